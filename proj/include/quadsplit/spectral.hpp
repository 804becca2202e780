#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "quadsplit/program.hpp"

namespace qs {

// Periodic tensor grid; dim d has sizes[d] points x = lo[d] + i h_d on [lo[d], hi[d]).
struct Grid {
  std::vector<int> sizes;
  std::vector<double> lo;
  std::vector<double> hi;

  Grid() = default;
  Grid(std::vector<int> sizes, std::vector<double> lo, std::vector<double> hi);
  static Grid uniform(int n, int size, double lo, double hi);

  int dim() const { return static_cast<int>(sizes.size()); }
  std::size_t total() const;
  double length(int d) const { return hi[d] - lo[d]; }
  double spacing(int d) const { return length(d) / sizes[d]; }
  double x(int d, int i) const { return lo[d] + i * spacing(d); }
  // Angular frequency of FFT index i: (2 pi / L) k with k = i for i < N/2, else i - N.
  double xi(int d, int i) const;
  bool is_nyquist(int d, int i) const { return sizes[d] % 2 == 0 && 2 * i == sizes[d]; }
  std::size_t stride(int d) const;
  double cell_volume() const;
  double max_abs_x(int d) const;
  void validate() const;
  bool operator==(const Grid& o) const { return sizes == o.sizes && lo == o.lo && hi == o.hi; }
};

enum class Space { physical, frequency };

struct StateField {
  Grid grid;
  std::vector<std::complex<double>> values;
  std::vector<Space> space;

  StateField() = default;
  explicit StateField(Grid g);
  static StateField from_function(const Grid& g, const std::function<std::complex<double>(const std::vector<double>&)>& f);

  bool all_physical() const;
};

struct ExecutionStats {
  long long fft_passes = 0;      // transforms of every line along one dim
  long long fft_1d_calls = 0;    // single length-N transforms
  long long pointwise_mults = 0;
  double wall_seconds = 0.0;

  ExecutionStats& operator+=(const ExecutionStats& o);
};

// One step; the field is returned to physical space afterwards.
void apply_step(StateField& field, const SplitStep& step, ExecutionStats& stats);

struct StepDiagnostic {
  int step_index = 0;
  std::string kind;
  double norm_after = 0.0;
  long long fft_calls = 0;
};

// Applies the steps in order. With fuse, each dim is transformed only when a step needs the other
// space, so back-to-back Fourier steps share transforms. The result is in physical space.
ExecutionStats execute(StateField& field, const SplittingProgram& prog, bool fuse = true,
                       std::vector<StepDiagnostic>* diagnostics = nullptr);

void to_physical(StateField& field, ExecutionStats& stats);

// Discrete L2 norm with spacing weights; valid in either space (Parseval).
double l2_norm(const StateField& f);
// |a - b| / |b|, or |a - b| when |b| < 1e-300. Both fields must be in physical space.
double l2_error(const StateField& a, const StateField& b);
// Fraction of |u|^2 in the outer 5% index shell of any dim.
double boundary_mass(const StateField& f);

}  // namespace qs
