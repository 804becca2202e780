#include "quadsplit/field_io.hpp"

#include <bit>
#include <cstdio>
#include <fstream>
#include <json.hpp>

#include "quadsplit/errors.hpp"

namespace qs {

static_assert(std::endian::native == std::endian::little, "field files are little-endian");

void write_field(const std::string& path, const StateField& f, FieldDtype dtype) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::io, "cannot open " + path + " for writing");
  if (dtype == FieldDtype::complex128) {
    out.write(reinterpret_cast<const char*>(f.values.data()),
              static_cast<std::streamsize>(f.values.size() * sizeof(std::complex<double>)));
  } else {
    std::vector<std::complex<float>> buf(f.values.begin(), f.values.end());
    out.write(reinterpret_cast<const char*>(buf.data()),
              static_cast<std::streamsize>(buf.size() * sizeof(std::complex<float>)));
  }
  if (!out) throw Error(ErrorKind::io, "write failed: " + path);

  nlohmann::json meta;
  meta["sizes"] = f.grid.sizes;
  nlohmann::json bounds = nlohmann::json::array();
  for (int d = 0; d < f.grid.dim(); ++d) bounds.push_back({f.grid.lo[d], f.grid.hi[d]});
  meta["bounds"] = bounds;
  nlohmann::json space = nlohmann::json::array();
  for (Space s : f.space) space.push_back(s == Space::physical ? "physical" : "frequency");
  meta["space"] = space;
  meta["dtype"] = dtype == FieldDtype::complex128 ? "complex128" : "complex64";
  std::ofstream side(path + ".json");
  if (!side) throw Error(ErrorKind::io, "cannot open " + path + ".json for writing");
  side << meta.dump(2) << '\n';
}

StateField read_field(const std::string& path) {
  std::ifstream side(path + ".json");
  if (!side) throw Error(ErrorKind::io, "missing sidecar " + path + ".json");
  nlohmann::json meta;
  try {
    side >> meta;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::io, std::string("bad sidecar: ") + e.what());
  }
  std::vector<double> lo, hi;
  for (const auto& b : meta.at("bounds")) {
    lo.push_back(b.at(0).get<double>());
    hi.push_back(b.at(1).get<double>());
  }
  StateField f(Grid(meta.at("sizes").get<std::vector<int>>(), lo, hi));
  if (meta.contains("space")) {
    const auto& sp = meta.at("space");
    if (sp.size() != f.space.size()) throw Error(ErrorKind::io, "sidecar space has wrong length");
    for (std::size_t d = 0; d < sp.size(); ++d) f.space[d] = sp[d] == "frequency" ? Space::frequency : Space::physical;
  }
  const std::string dtype = meta.value("dtype", "complex128");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open " + path);
  if (dtype == "complex128") {
    in.read(reinterpret_cast<char*>(f.values.data()),
            static_cast<std::streamsize>(f.values.size() * sizeof(std::complex<double>)));
  } else if (dtype == "complex64") {
    std::vector<std::complex<float>> buf(f.values.size());
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size() * sizeof(std::complex<float>)));
    for (std::size_t i = 0; i < buf.size(); ++i) f.values[i] = buf[i];
  } else {
    throw Error(ErrorKind::io, "unknown dtype " + dtype);
  }
  if (!in) throw Error(ErrorKind::io, "short read: " + path);
  return f;
}

void write_diagnostics_csv(const std::string& path, const std::vector<StepDiagnostic>& rows) {
  std::FILE* fp = std::fopen(path.c_str(), "w");
  if (!fp) throw Error(ErrorKind::io, "cannot open " + path + " for writing");
  std::fprintf(fp, "step_index,kind,norm_after,fft_calls\n");
  for (const auto& r : rows) std::fprintf(fp, "%d,%s,%.17g,%lld\n", r.step_index, r.kind.c_str(), r.norm_after, r.fft_calls);
  std::fclose(fp);
}

}  // namespace qs
