#pragma once

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <vector>

#include "cocert/group.hpp"
#include "cocert/serialize.hpp"
#include "cocert/star_algebra.hpp"

namespace cocert {

/// The t-th face of an (n+1)-cell equals the n-cell `tau` translated by `g`. The
/// group acts on the right of cells: face_t(sigma) = tau . g, so that composites of
/// face maps read left to right as D_{n-1} D_n.
struct FaceRecord {
  int t = 0;
  Word g;
  std::string tau;
};

struct Cell {
  std::string name;
  std::vector<FaceRecord> faces;  // empty in degree 0
};

/// Hypotheses the artifact records but does not check.
struct Assertions {
  bool contractible = false;
  bool finite_stabilizers = false;
  bool inversion_free = false;
};

struct ChainWitness {
  int degree = 0;  // n in D_{n-1} D_n
  std::size_t row = 0;
  std::size_t col = 0;
  GAElem value{GroupPtr{}};
};

struct ChainCheck {
  bool holds = true;
  std::optional<ChainWitness> witness;
};

struct Laplacians {
  GAMatrix full;   // D_n D_n^* + D_{n-1}^* D_{n-1}
  GAMatrix plus;   // D_n D_n^*
  GAMatrix minus;  // D_{n-1}^* D_{n-1}
};

class EquivariantComplex {
 public:
  /// Validates cells, builds D_0..D_N. With `check_chain`, throws
  /// ChainConditionViolated naming the first nonzero entry of some D_{n-1} D_n.
  EquivariantComplex(GroupPtr group, std::vector<std::vector<Cell>> cells, Assertions assertions,
                     bool check_chain = true);

  const GroupPtr& group() const { return group_; }
  const Assertions& assertions() const { return assertions_; }
  /// Cells are given for degrees 0..N+1.
  int top_degree() const { return static_cast<int>(cells_.size()) - 2; }
  /// k_n; zero outside the described range.
  std::size_t orbit_count(int n) const;
  const std::vector<Cell>& cells(int n) const { return cells_.at(static_cast<std::size_t>(n)); }

  /// D_n : k_n x k_{n+1}, for 0 <= n <= N. Entry (tau, sigma) sums (-1)^t g over face records.
  const GAMatrix& boundary(int n) const;
  /// D_n with the conventions D_{-1} = 0 x k_0 and D_{N+1} = k_{N+1} x 0.
  GAMatrix boundary_or_empty(int n) const;

  /// D_{n-1} D_n == 0; degrees beyond the data count as zero spaces.
  ChainCheck verify_chain(int n) const;

  /// Valid for 0 <= n <= N+1; the minus part vanishes at n = 0 and the plus part at N+1.
  Laplacians laplacian(int n) const;

 private:
  void check_degree(int n, int lo, int hi) const;

  GroupPtr group_;
  std::vector<std::vector<Cell>> cells_;
  Assertions assertions_;
  std::vector<GAMatrix> boundaries_;
};

/// Reads a workspace document ({group, complex, assertions, ...}) and compiles it.
EquivariantComplex compile(const nlohmann::json& doc, bool check_chain = true);
EquivariantComplex compile_text(const std::string& text, bool check_chain = true);

}  // namespace cocert
