#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <array>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace delam {

using Index = Eigen::Index;
using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;
using SparseMat = Eigen::SparseMatrix<double>;

/// Raised when a mesh or pairing violates one of its structural invariants.
class MeshError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class BoundaryTag { Dirichlet, Neumann, Contact };

std::string to_string(BoundaryTag tag);
BoundaryTag tag_from_string(const std::string& name);

/// Boundary discretization of one elastic subdomain.
///
/// Elements are straight two-node segments forming a single closed loop that
/// runs counterclockwise around the domain. Units are mm throughout.
struct DomainMesh {
  int domain_id = 0;
  std::vector<Vec2> nodes;
  std::vector<std::array<Index, 2>> elements;
  std::vector<BoundaryTag> tags;

  Index num_nodes() const { return static_cast<Index>(nodes.size()); }
  Index num_elements() const { return static_cast<Index>(elements.size()); }

  double element_length(Index e) const;
  /// Unit vector from the first to the second node of element `e`.
  Vec2 tangent(Index e) const;
  /// Outward unit normal (right of the direction of travel on a CCW loop).
  Vec2 outward_normal(Index e) const;

  /// Element ending at / starting from `node` along the loop.
  Index element_before(Index node) const { return prev_element_.at(static_cast<std::size_t>(node)); }
  Index element_after(Index node) const { return next_element_.at(static_cast<std::size_t>(node)); }

  bool touches(Index node, BoundaryTag tag) const;
  /// Sorted, unique nodes belonging to at least one element of `tag`.
  std::vector<Index> nodes_of(BoundaryTag tag) const;
  std::vector<Index> elements_of(BoundaryTag tag) const;

  double diameter() const;
  double signed_area() const;

  /// Rebuilds loop connectivity and checks every invariant; throws MeshError.
  void finalize();

 private:
  std::vector<Index> prev_element_;
  std::vector<Index> next_element_;
};

enum class RectSide { Bottom = 0, Right = 1, Top = 2, Left = 3 };

struct SideSpec {
  Index count = 1;
  BoundaryTag tag = BoundaryTag::Neumann;
};

/// Sub-interval of one rectangle side that is tagged Contact. `begin`/`end`
/// are coordinates along the side's axis (x for bottom/top, y for left/right).
/// With `count` unset the span must coincide with nodes of the uniform side
/// mesh; with `count` set the span gets exactly that many elements and the
/// remaining pieces of the side are meshed at the closest matching size.
struct ContactSpan {
  RectSide side = RectSide::Bottom;
  double begin = 0.0;
  double end = 0.0;
  std::optional<Index> count;
};

struct RectangleSpec {
  double length = 1.0;
  double height = 1.0;
  std::array<SideSpec, 4> sides{};  // indexed by RectSide
  std::optional<ContactSpan> contact;
  int domain_id = 0;
  Vec2 origin = Vec2::Zero();
};

DomainMesh build_rectangle(const RectangleSpec& spec);

enum class PairingKind { RigidObstacle, TwoDomain };

struct NodeRef {
  int domain = 0;
  Index node = 0;
  friend bool operator==(const NodeRef&, const NodeRef&) = default;
};

/// One interface node: a contact node of `primary`, optionally matched with a
/// coincident node of another domain. `normal` points from the secondary side
/// (or the rigid obstacle) into the primary domain, so a positive normal jump
/// is an opening.
struct InterfaceEntry {
  NodeRef primary;
  std::optional<NodeRef> secondary;
  Vec2 normal = Vec2::UnitY();
  Vec2 tangent = Vec2::UnitX();
};

/// Node pairing of a contact zone plus the interface elements spanning it.
/// Damage lives on `elements`, slips and jumps on `entries`.
struct InterfacePairing {
  PairingKind kind = PairingKind::RigidObstacle;
  std::vector<InterfaceEntry> entries;
  std::vector<std::array<Index, 2>> elements;  // entry indices
  std::vector<double> element_lengths;

  Index num_entries() const { return static_cast<Index>(entries.size()); }
  Index num_elements() const { return static_cast<Index>(elements.size()); }
  /// x-coordinate style abscissa of each entry along the interface, starting at 0.
  std::vector<double> arc_length() const;
  /// Nodal weights of the trapezoidal rule on the interface elements.
  VecX lumped_weights() const;
  void validate() const;
};

/// Pairs every Contact node of `mesh` with a rigid foundation. The normal is
/// the inward normal of the domain (outward normal of the obstacle) and the
/// tangent is the normal rotated clockwise by 90 degrees.
InterfacePairing pair_with_obstacle(const DomainMesh& mesh);

/// Matches the Contact nodes of two domains geometrically; `primary` side
/// displacements enter jumps with a plus sign.
InterfacePairing pair_domains(const DomainMesh& primary, const DomainMesh& secondary,
                              double tolerance = 1e-9);

/// Offsets of each domain's nodal displacements in a stacked vector
/// [domain 0 nodes (x,y), domain 1 nodes (x,y), ...].
struct StackedLayout {
  std::vector<int> domain_ids;
  std::vector<Index> offsets;
  std::vector<Index> node_counts;
  Index size = 0;

  static StackedLayout full_boundary(std::span<const DomainMesh> meshes);
  /// Column of the x component of `ref`; throws MeshError naming the node.
  Index column(const NodeRef& ref) const;
};

/// Sparse map from stacked boundary displacements to per-entry
/// (normal jump, tangential jump), rows ordered entry by entry.
SparseMat jump_operator(const InterfacePairing& pairing, std::span<const DomainMesh> meshes);

}  // namespace delam
