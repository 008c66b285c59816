#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "thermo/model.hpp"

namespace thermo {

enum class Provenance { Printed, Assembled };
std::string_view to_string(Provenance p);
Provenance parse_provenance(std::string_view text);

// State ordering is (u-block, v-block, theta-block), each of length n.
class GeneratorMatrix {
 public:
  GeneratorMatrix(CouplingModel model, BoundaryCase bc, int n, Eigen::MatrixXd entries,
                  Provenance provenance);

  const CouplingModel& model() const { return model_; }
  BoundaryCase bc() const { return bc_; }
  int n() const { return n_; }
  int dim() const { return 3 * n_; }
  const Eigen::MatrixXd& entries() const { return entries_; }
  Provenance provenance() const { return provenance_; }

 private:
  CouplingModel model_;
  BoundaryCase bc_;
  int n_;
  Eigen::MatrixXd entries_;
  Provenance provenance_;
};

// Unchecked wrapper for arbitrary square matrices (tests, synthetic inputs).
// dim must be divisible by 3 for block-aware consumers; others only need a square matrix.
GeneratorMatrix wrap_matrix(const Eigen::MatrixXd& entries);

GeneratorMatrix build_generator_printed(const CouplingModel& model, BoundaryCase bc, int n);
GeneratorMatrix build_generator_assembled(const CouplingModel& model, BoundaryCase bc, int n);
GeneratorMatrix build_generator(const CouplingModel& model, BoundaryCase bc, int n,
                                Provenance provenance = Provenance::Assembled);

// Block template shared by every case:
//   [[0, D^T, 0], [-D, 0, -gamma F], [0, gamma F^T, -G]]
Eigen::MatrixXd compose_blocks(const Eigen::MatrixXd& D, const Eigen::MatrixXd& F,
                               const Eigen::MatrixXd& G, double gamma);

struct DissipativityDefect {
  double sampled_max;         // max Re<Ay,y> over random unit y
  double symmetric_part_max;  // largest eigenvalue of (A + A^T)/2
};
DissipativityDefect dissipativity_defect(const GeneratorMatrix& A, int trials,
                                         std::uint64_t seed = 42);

// Printed D, F, G with a mask of entries whose printed formula is undefined.
struct PrintedBlocks {
  Eigen::MatrixXd D, F, G;
  std::vector<std::pair<int, int>> undefined_D, undefined_F, undefined_G;
};
PrintedBlocks printed_blocks(CouplingKind kind, BoundaryCase bc, int n);

enum class BlockStatus { Match, Mismatch, Undefined };
std::string_view to_string(BlockStatus s);

struct BlockComparison {
  std::string block;  // "D", "F" or "G"
  BlockStatus status;
  double max_abs_diff;  // over entries where the printed formula is defined
  std::vector<std::pair<int, int>> undefined_entries;  // 1-based (i, j)
};

struct DiscrepancyReport {
  CouplingKind kind;
  BoundaryCase bc;
  int n;
  double tolerance;
  std::vector<BlockComparison> blocks;
  bool consistent() const;
  nlohmann::json to_json() const;
};

// Compares printed and assembled orthonormal-frame blocks entrywise.
DiscrepancyReport compare_printed_assembled(CouplingKind kind, BoundaryCase bc, int n,
                                            double tol = 1e-10);

void write_csv(std::ostream& out, const Eigen::MatrixXd& M);
nlohmann::json to_json(const GeneratorMatrix& A);

}  // namespace thermo
