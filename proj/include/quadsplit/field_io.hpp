#pragma once

#include <string>
#include <vector>

#include "quadsplit/spectral.hpp"

namespace qs {

enum class FieldDtype { complex128, complex64 };

// Raw little-endian interleaved values in `path`, metadata in `path + ".json"`:
// {sizes, bounds: [[lo, hi], ...], space, dtype}.
void write_field(const std::string& path, const StateField& f, FieldDtype dtype = FieldDtype::complex128);
StateField read_field(const std::string& path);

// CSV with header step_index,kind,norm_after,fft_calls.
void write_diagnostics_csv(const std::string& path, const std::vector<StepDiagnostic>& rows);

}  // namespace qs
