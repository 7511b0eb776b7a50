#include "delam/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace delam {

namespace {

std::string node_name(int domain, Index node) {
  std::ostringstream os;
  os << "domain " << domain << " node " << node;
  return os.str();
}

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

// Proper or touching intersection of closed segments [p1,p2] and [q1,q2].
bool segments_intersect(const Vec2& p1, const Vec2& p2, const Vec2& q1, const Vec2& q2,
                        double tol) {
  const auto orient = [tol](const Vec2& a, const Vec2& b, const Vec2& c) {
    const double v = cross(b - a, c - a);
    return v > tol ? 1 : (v < -tol ? -1 : 0);
  };
  const auto on_segment = [tol](const Vec2& a, const Vec2& b, const Vec2& c) {
    return c.x() <= std::max(a.x(), b.x()) + tol && c.x() >= std::min(a.x(), b.x()) - tol &&
           c.y() <= std::max(a.y(), b.y()) + tol && c.y() >= std::min(a.y(), b.y()) - tol;
  };
  const int o1 = orient(p1, p2, q1), o2 = orient(p1, p2, q2);
  const int o3 = orient(q1, q2, p1), o4 = orient(q1, q2, p2);
  if (o1 != o2 && o3 != o4 && o1 * o2 <= 0 && o3 * o4 <= 0 && (o1 != 0 || o2 != 0)) return true;
  if (o1 == 0 && on_segment(p1, p2, q1)) return true;
  if (o2 == 0 && on_segment(p1, p2, q2)) return true;
  if (o3 == 0 && on_segment(q1, q2, p1)) return true;
  if (o4 == 0 && on_segment(q1, q2, p2)) return true;
  return false;
}

Vec2 perp_cw(const Vec2& v) { return {v.y(), -v.x()}; }

}  // namespace

std::string to_string(BoundaryTag tag) {
  switch (tag) {
    case BoundaryTag::Dirichlet: return "dirichlet";
    case BoundaryTag::Neumann: return "neumann";
    case BoundaryTag::Contact: return "contact";
  }
  return "unknown";
}

BoundaryTag tag_from_string(const std::string& name) {
  if (name == "dirichlet" || name == "D") return BoundaryTag::Dirichlet;
  if (name == "neumann" || name == "N") return BoundaryTag::Neumann;
  if (name == "contact" || name == "C") return BoundaryTag::Contact;
  throw MeshError("unknown boundary tag '" + name + "'");
}

double DomainMesh::element_length(Index e) const {
  const auto& el = elements[static_cast<std::size_t>(e)];
  return (nodes[static_cast<std::size_t>(el[1])] - nodes[static_cast<std::size_t>(el[0])]).norm();
}

Vec2 DomainMesh::tangent(Index e) const {
  const auto& el = elements[static_cast<std::size_t>(e)];
  return (nodes[static_cast<std::size_t>(el[1])] - nodes[static_cast<std::size_t>(el[0])]).normalized();
}

Vec2 DomainMesh::outward_normal(Index e) const { return perp_cw(tangent(e)); }

bool DomainMesh::touches(Index node, BoundaryTag tag) const {
  return tags[static_cast<std::size_t>(element_before(node))] == tag ||
         tags[static_cast<std::size_t>(element_after(node))] == tag;
}

std::vector<Index> DomainMesh::nodes_of(BoundaryTag tag) const {
  std::vector<Index> out;
  for (Index n = 0; n < num_nodes(); ++n)
    if (touches(n, tag)) out.push_back(n);
  return out;
}

std::vector<Index> DomainMesh::elements_of(BoundaryTag tag) const {
  std::vector<Index> out;
  for (Index e = 0; e < num_elements(); ++e)
    if (tags[static_cast<std::size_t>(e)] == tag) out.push_back(e);
  return out;
}

double DomainMesh::diameter() const {
  if (nodes.empty()) return 0.0;
  Vec2 lo = nodes.front(), hi = nodes.front();
  for (const auto& p : nodes) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  return (hi - lo).norm();
}

double DomainMesh::signed_area() const {
  double a = 0.0;
  for (const auto& el : elements)
    a += cross(nodes[static_cast<std::size_t>(el[0])], nodes[static_cast<std::size_t>(el[1])]);
  return 0.5 * a;
}

void DomainMesh::finalize() {
  const auto nn = nodes.size();
  const auto ne = elements.size();
  if (ne < 3) throw MeshError("mesh invariant: a closed loop needs at least 3 elements");
  if (tags.size() != ne) throw MeshError("mesh invariant: every element needs exactly one tag");

  prev_element_.assign(nn, -1);
  next_element_.assign(nn, -1);
  for (std::size_t e = 0; e < ne; ++e) {
    for (Index n : elements[e])
      if (n < 0 || static_cast<std::size_t>(n) >= nn)
        throw MeshError("mesh invariant: element " + std::to_string(e) + " references missing node " +
                        std::to_string(n));
    auto& out = next_element_[static_cast<std::size_t>(elements[e][0])];
    auto& in = prev_element_[static_cast<std::size_t>(elements[e][1])];
    if (out != -1 || in != -1)
      throw MeshError("mesh invariant: elements do not form a single loop (branch at element " +
                      std::to_string(e) + ")");
    out = static_cast<Index>(e);
    in = static_cast<Index>(e);
  }
  for (std::size_t n = 0; n < nn; ++n)
    if (prev_element_[n] == -1 || next_element_[n] == -1)
      throw MeshError("mesh invariant: " + node_name(domain_id, static_cast<Index>(n)) +
                      " is not on the boundary loop");

  // single loop: walk from element 0
  std::size_t visited = 0;
  Index e = 0;
  do {
    ++visited;
    e = next_element_[static_cast<std::size_t>(elements[static_cast<std::size_t>(e)][1])];
  } while (e != 0 && visited <= ne);
  if (visited != ne) throw MeshError("mesh invariant: elements form more than one closed loop");

  const double diam = diameter();
  const double tol = 1e-12 * diam;
  for (std::size_t k = 0; k < ne; ++k)
    if (!(element_length(static_cast<Index>(k)) > tol))
      throw MeshError("mesh invariant: element " + std::to_string(k) + " has zero length");
  for (std::size_t a = 0; a < nn; ++a)
    for (std::size_t b = a + 1; b < nn; ++b)
      if ((nodes[a] - nodes[b]).norm() <= 1e-10 * diam)
        throw MeshError("mesh invariant: duplicate nodes " + std::to_string(a) + " and " +
                        std::to_string(b));

  if (!(signed_area() > 0.0)) throw MeshError("mesh invariant: boundary loop is not counterclockwise");

  for (std::size_t a = 0; a < ne; ++a) {
    for (std::size_t b = a + 1; b < ne; ++b) {
      const auto& ea = elements[a];
      const auto& eb = elements[b];
      if (ea[0] == eb[1] || ea[1] == eb[0] || ea[0] == eb[0] || ea[1] == eb[1]) continue;
      if (segments_intersect(nodes[static_cast<std::size_t>(ea[0])], nodes[static_cast<std::size_t>(ea[1])],
                             nodes[static_cast<std::size_t>(eb[0])], nodes[static_cast<std::size_t>(eb[1])],
                             1e-14 * diam * diam))
        throw MeshError("mesh invariant: elements " + std::to_string(a) + " and " + std::to_string(b) +
                        " intersect");
    }
  }

  for (Index n = 0; n < static_cast<Index>(nn); ++n)
    if (touches(n, BoundaryTag::Contact) && touches(n, BoundaryTag::Dirichlet))
      throw MeshError("mesh invariant: closures of the Dirichlet and Contact parts meet at " +
                      node_name(domain_id, n));
}

DomainMesh build_rectangle(const RectangleSpec& spec) {
  if (!(spec.length > 0.0) || !(spec.height > 0.0))
    throw MeshError("rectangle: length and height must be positive");
  for (const auto& s : spec.sides)
    if (s.count < 1) throw MeshError("rectangle: every side needs at least one element");

  const std::array<Vec2, 4> corners = {spec.origin, spec.origin + Vec2(spec.length, 0.0),
                                       spec.origin + Vec2(spec.length, spec.height),
                                       spec.origin + Vec2(0.0, spec.height)};
  const std::array<double, 4> side_len = {spec.length, spec.height, spec.length, spec.height};

  DomainMesh mesh;
  mesh.domain_id = spec.domain_id;

  for (int s = 0; s < 4; ++s) {
    const SideSpec& side = spec.sides[static_cast<std::size_t>(s)];
    const double len = side_len[static_cast<std::size_t>(s)];
    const Vec2 p0 = corners[static_cast<std::size_t>(s)];
    const Vec2 dir = (corners[static_cast<std::size_t>((s + 1) % 4)] - p0) / len;

    // (parameter breakpoints, element count, tag) pieces along the side
    struct Piece {
      double a, b;
      Index count;
      BoundaryTag tag;
    };
    std::vector<Piece> pieces;

    const bool has_contact = spec.contact && static_cast<int>(spec.contact->side) == s;
    if (!has_contact) {
      pieces.push_back({0.0, len, side.count, side.tag});
    } else {
      const ContactSpan& span = *spec.contact;
      if (side.tag == BoundaryTag::Dirichlet)
        throw MeshError("rectangle: contact span lies on a Dirichlet side (closures of Dirichlet and "
                        "Contact parts must be disjoint)");
      if (!(span.end > span.begin)) throw MeshError("rectangle: empty contact span");
      double a = span.begin, b = span.end;
      if (s >= 2) {  // top and left sides run against their axis
        a = len - span.end;
        b = len - span.begin;
      }
      const double eps = 1e-9 * len;
      if (a < -eps || b > len + eps) throw MeshError("rectangle: contact span outside its side");
      a = std::clamp(a, 0.0, len);
      b = std::clamp(b, 0.0, len);

      if (span.count) {
        if (*span.count < 1) throw MeshError("rectangle: contact span needs at least one element");
        const double hc = (b - a) / static_cast<double>(*span.count);
        const auto fill = [&](double x0, double x1) {
          if (x1 - x0 > eps)
            pieces.push_back({x0, x1, std::max<Index>(1, std::lround((x1 - x0) / hc)), side.tag});
        };
        fill(0.0, a);
        pieces.push_back({a, b, *span.count, BoundaryTag::Contact});
        fill(b, len);
      } else {
        const double h = len / static_cast<double>(side.count);
        const double ia = a / h, ib = b / h;
        if (std::abs(ia - std::round(ia)) > 1e-6 || std::abs(ib - std::round(ib)) > 1e-6)
          throw MeshError("rectangle: contact span is not aligned with the uniform side mesh");
        const Index na = std::lround(ia), nb = std::lround(ib);
        if (na > 0) pieces.push_back({0.0, na * h, na, side.tag});
        pieces.push_back({na * h, nb * h, nb - na, BoundaryTag::Contact});
        if (nb < side.count) pieces.push_back({nb * h, len, side.count - nb, side.tag});
      }
    }

    for (const Piece& piece : pieces) {
      const double h = (piece.b - piece.a) / static_cast<double>(piece.count);
      for (Index k = 0; k < piece.count; ++k) {
        mesh.nodes.push_back(p0 + dir * (piece.a + h * static_cast<double>(k)));
        mesh.tags.push_back(piece.tag);
      }
    }
  }

  const Index nn = static_cast<Index>(mesh.nodes.size());
  for (Index n = 0; n < nn; ++n) mesh.elements.push_back({n, (n + 1) % nn});
  mesh.finalize();
  return mesh;
}

std::vector<double> InterfacePairing::arc_length() const {
  std::vector<double> s(entries.size(), 0.0);
  for (std::size_t e = 0; e < elements.size(); ++e)
    s[static_cast<std::size_t>(elements[e][1])] = s[static_cast<std::size_t>(elements[e][0])] + element_lengths[e];
  return s;
}

VecX InterfacePairing::lumped_weights() const {
  VecX w = VecX::Zero(num_entries());
  for (std::size_t e = 0; e < elements.size(); ++e) {
    w(elements[e][0]) += 0.5 * element_lengths[e];
    w(elements[e][1]) += 0.5 * element_lengths[e];
  }
  return w;
}

void InterfacePairing::validate() const {
  if (elements.size() != element_lengths.size())
    throw MeshError("pairing invariant: one length per interface element");
  for (const auto& en : entries) {
    if (std::abs(en.normal.norm() - 1.0) > 1e-10 || std::abs(en.tangent.norm() - 1.0) > 1e-10 ||
        std::abs(en.normal.dot(en.tangent)) > 1e-10)
      throw MeshError("pairing invariant: frame of " + node_name(en.primary.domain, en.primary.node) +
                      " is not orthonormal");
    if ((kind == PairingKind::TwoDomain) != en.secondary.has_value())
      throw MeshError("pairing invariant: entry kind mismatch at " +
                      node_name(en.primary.domain, en.primary.node));
  }
  for (std::size_t e = 0; e < elements.size(); ++e) {
    for (Index k : elements[e])
      if (k < 0 || k >= num_entries()) throw MeshError("pairing invariant: interface element refers to a missing entry");
    if (!(element_lengths[e] > 0.0)) throw MeshError("pairing invariant: zero-length interface element");
  }
}

namespace {

// Contact nodes in loop order, chains starting where a non-contact element precedes.
std::vector<Index> contact_nodes_in_loop_order(const DomainMesh& mesh) {
  std::vector<Index> order;
  std::vector<char> seen(static_cast<std::size_t>(mesh.num_nodes()), 0);
  const auto contact_el = [&](Index e) { return mesh.tags[static_cast<std::size_t>(e)] == BoundaryTag::Contact; };
  for (Index e = 0; e < mesh.num_elements(); ++e) {
    if (!contact_el(e)) continue;
    const Index first = mesh.elements[static_cast<std::size_t>(e)][0];
    if (contact_el(mesh.element_before(first))) continue;  // not a chain start
    Index cur = e;
    order.push_back(first);
    seen[static_cast<std::size_t>(first)] = 1;
    while (contact_el(cur)) {
      const Index nxt = mesh.elements[static_cast<std::size_t>(cur)][1];
      if (seen[static_cast<std::size_t>(nxt)]) break;
      order.push_back(nxt);
      seen[static_cast<std::size_t>(nxt)] = 1;
      cur = mesh.element_after(nxt);
    }
  }
  // a contact zone covering the whole loop has no chain start
  if (order.empty() && !mesh.elements_of(BoundaryTag::Contact).empty())
    for (Index n = 0; n < mesh.num_nodes(); ++n) order.push_back(mesh.elements[static_cast<std::size_t>(n)][0]);
  return order;
}

Vec2 inward_node_normal(const DomainMesh& mesh, Index node) {
  Vec2 n = Vec2::Zero();
  for (Index e : {mesh.element_before(node), mesh.element_after(node)})
    if (mesh.tags[static_cast<std::size_t>(e)] == BoundaryTag::Contact) n -= mesh.outward_normal(e);
  return n.normalized();
}

}  // namespace

InterfacePairing pair_with_obstacle(const DomainMesh& mesh) {
  InterfacePairing pairing;
  pairing.kind = PairingKind::RigidObstacle;
  const auto order = contact_nodes_in_loop_order(mesh);
  if (order.empty()) throw MeshError("pairing: " + node_name(mesh.domain_id, -1) + " has no contact part");
  std::map<Index, Index> entry_of;
  for (Index node : order) {
    InterfaceEntry en;
    en.primary = {mesh.domain_id, node};
    en.normal = inward_node_normal(mesh, node);
    en.tangent = perp_cw(en.normal);
    entry_of[node] = pairing.num_entries();
    pairing.entries.push_back(en);
  }
  for (Index e : mesh.elements_of(BoundaryTag::Contact)) {
    const auto& el = mesh.elements[static_cast<std::size_t>(e)];
    pairing.elements.push_back({entry_of.at(el[0]), entry_of.at(el[1])});
    pairing.element_lengths.push_back(mesh.element_length(e));
  }
  pairing.validate();
  return pairing;
}

InterfacePairing pair_domains(const DomainMesh& primary, const DomainMesh& secondary, double tolerance) {
  InterfacePairing pairing = pair_with_obstacle(primary);
  pairing.kind = PairingKind::TwoDomain;
  const double tol = tolerance * std::max(primary.diameter(), secondary.diameter());
  const auto sec_nodes = secondary.nodes_of(BoundaryTag::Contact);
  std::vector<char> used(sec_nodes.size(), 0);
  std::map<Index, Index> sec_of_primary;

  for (auto& en : pairing.entries) {
    const Vec2& x = primary.nodes[static_cast<std::size_t>(en.primary.node)];
    std::optional<std::size_t> hit;
    for (std::size_t k = 0; k < sec_nodes.size(); ++k)
      if ((secondary.nodes[static_cast<std::size_t>(sec_nodes[k])] - x).norm() <= tol) hit = k;
    if (!hit)
      throw MeshError("pairing: unmatched contact node " + node_name(primary.domain_id, en.primary.node));
    used[*hit] = 1;
    en.secondary = NodeRef{secondary.domain_id, sec_nodes[*hit]};
    sec_of_primary[en.primary.node] = sec_nodes[*hit];
  }
  for (std::size_t k = 0; k < sec_nodes.size(); ++k)
    if (!used[k]) throw MeshError("pairing: unmatched contact node " + node_name(secondary.domain_id, sec_nodes[k]));

  // conforming: every primary contact element has a reversed twin on the secondary side
  for (Index e : primary.elements_of(BoundaryTag::Contact)) {
    const auto& el = primary.elements[static_cast<std::size_t>(e)];
    const Index sa = sec_of_primary.at(el[0]), sb = sec_of_primary.at(el[1]);
    const Index twin = secondary.element_after(sb);
    if (secondary.elements[static_cast<std::size_t>(twin)][1] != sa ||
        secondary.tags[static_cast<std::size_t>(twin)] != BoundaryTag::Contact)
      throw MeshError("pairing: non-conforming interface at element " + std::to_string(e) + " of domain " +
                      std::to_string(primary.domain_id));
  }
  pairing.validate();
  return pairing;
}

StackedLayout StackedLayout::full_boundary(std::span<const DomainMesh> meshes) {
  StackedLayout layout;
  for (const auto& m : meshes) {
    layout.domain_ids.push_back(m.domain_id);
    layout.offsets.push_back(layout.size);
    layout.node_counts.push_back(m.num_nodes());
    layout.size += 2 * m.num_nodes();
  }
  return layout;
}

Index StackedLayout::column(const NodeRef& ref) const {
  for (std::size_t d = 0; d < domain_ids.size(); ++d) {
    if (domain_ids[d] != ref.domain) continue;
    if (ref.node < 0 || ref.node >= node_counts[d])
      throw MeshError("unmatched node: " + node_name(ref.domain, ref.node) + " does not exist");
    return offsets[d] + 2 * ref.node;
  }
  throw MeshError("unmatched node: " + node_name(ref.domain, ref.node) + " refers to an unknown domain");
}

SparseMat jump_operator(const InterfacePairing& pairing, std::span<const DomainMesh> meshes) {
  const StackedLayout layout = StackedLayout::full_boundary(meshes);
  std::vector<Eigen::Triplet<double>> trip;
  for (Index i = 0; i < pairing.num_entries(); ++i) {
    const auto& en = pairing.entries[static_cast<std::size_t>(i)];
    const auto add = [&](const NodeRef& ref, double sign) {
      const Index c = layout.column(ref);
      for (int k = 0; k < 2; ++k) {
        trip.emplace_back(2 * i, c + k, sign * en.normal(k));
        trip.emplace_back(2 * i + 1, c + k, sign * en.tangent(k));
      }
    };
    add(en.primary, 1.0);
    if (en.secondary) add(*en.secondary, -1.0);
  }
  SparseMat J(2 * pairing.num_entries(), layout.size);
  J.setFromTriplets(trip.begin(), trip.end());
  return J;
}

}  // namespace delam
