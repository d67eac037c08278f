#include "tomo/observation_io.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace tomo {

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_or_nan(const std::vector<double>& v, std::size_t i, const char* spec) {
  if (i >= v.size()) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, spec, v[i]);
  return buf;
}

}  // namespace

void write_observations(const ObservationSet& set, std::ostream& out) {
  const auto& geom = set.geometry;
  char hash[32];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(geom.hash()));
  out << "# format " << kObservationFormatTag << " 1\n";
  out << "# seed " << set.seed << "\n";
  out << "# geometry_hash " << hash << "\n";
  out << "# wavelength " << fmt17(geom.wavelength()) << "\n";
  out << "# slant_range " << fmt17(geom.slant_range()) << "\n";
  out << "# baselines";
  for (double b : geom.baselines()) out << ' ' << fmt17(b);
  out << "\n# snr_db " << fmt17(set.snr_db) << "\n";
  for (std::size_t p = 0; p < set.pixels.size(); ++p) {
    const CVector& g = set.pixels[p];
    if (g.size() != geom.size()) throw TomoError("pixel length does not match geometry");
    out << p;
    for (Eigen::Index i = 0; i < g.size(); ++i) {
      out << ' ' << fmt17(g(i).real()) << ' ' << fmt17(g(i).imag());
    }
    out << '\n';
  }
  if (!out) throw TomoError("failed writing observations");
}

ObservationSet read_observations(std::istream& in) {
  std::map<std::string, std::vector<std::string>> header;
  std::vector<std::string> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream ls(line.substr(1));
      std::string key;
      if (!(ls >> key)) continue;
      std::vector<std::string> vals;
      for (std::string v; ls >> v;) vals.push_back(v);
      header[key] = std::move(vals);
    } else {
      rows.push_back(line);
    }
  }
  const auto need = [&](const std::string& key) -> const std::vector<std::string>& {
    const auto it = header.find(key);
    if (it == header.end() || it->second.empty()) {
      throw TomoError("observation file: missing header '" + key + "'");
    }
    return it->second;
  };
  const auto& fmt = need("format");
  if (fmt[0] != kObservationFormatTag || fmt.size() < 2 || fmt[1] != "1") {
    throw TomoError("observation file: unsupported format header");
  }
  const auto num = [](const std::string& s, const std::string& what) {
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw TomoError("observation file: bad number '" + s + "' in " + what);
    }
  };
  std::vector<double> baselines;
  for (const auto& s : need("baselines")) baselines.push_back(num(s, "baselines"));
  ObservationSet set{AcquisitionGeometry(std::move(baselines), num(need("wavelength")[0], "wavelength"),
                                         num(need("slant_range")[0], "slant_range")),
                     num(need("snr_db")[0], "snr_db"), 0, {}};
  set.seed = std::stoull(need("seed")[0]);
  char hash[32];
  std::snprintf(hash, sizeof hash, "%016llx",
                static_cast<unsigned long long>(set.geometry.hash()));
  if (need("geometry_hash")[0] != hash) {
    throw TomoError("observation file: geometry_hash does not match the stored baselines");
  }
  const int n = set.geometry.size();
  for (const auto& row : rows) {
    std::istringstream rs(row);
    std::string tok;
    rs >> tok;
    std::vector<double> vals;
    while (rs >> tok) vals.push_back(num(tok, "pixel row"));
    if (vals.size() != static_cast<std::size_t>(2 * n)) {
      throw TomoError("observation file: pixel row has " + std::to_string(vals.size()) +
                      " numbers, expected " + std::to_string(2 * n));
    }
    CVector g(n);
    for (int i = 0; i < n; ++i) g(i) = cdouble(vals[2 * i], vals[2 * i + 1]);
    set.pixels.push_back(std::move(g));
  }
  return set;
}

ObservationSet load_observations(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw TomoError("cannot open observation file '" + path.string() + "'");
  return read_observations(in);
}

void write_estimates(const std::vector<PixelEstimate>& estimates, std::ostream& out) {
  out << "pixel\torder\ts1\ts2\teig1\teig2\troot_mod1\troot_mod2\tconverged\n";
  for (std::size_t p = 0; p < estimates.size(); ++p) {
    const auto& e = estimates[p];
    out << p << '\t' << e.order << '\t' << fmt_or_nan(e.elevations, 0, "%.6f") << '\t'
        << fmt_or_nan(e.elevations, 1, "%.6f") << '\t' << fmt_or_nan(e.eigenvalues, 0, "%.6e")
        << '\t' << fmt_or_nan(e.eigenvalues, 1, "%.6e") << '\t'
        << fmt_or_nan(e.root_moduli, 0, "%.9f") << '\t' << fmt_or_nan(e.root_moduli, 1, "%.9f")
        << '\t' << (e.converged ? 1 : 0) << '\n';
  }
  if (!out) throw TomoError("failed writing estimates");
}

}  // namespace tomo
