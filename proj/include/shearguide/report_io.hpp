#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>

#include "json.hpp"
#include "shearguide/certificates.hpp"
#include "shearguide/thresholds.hpp"
#include "shearguide/waveguide.hpp"

namespace shearguide {

using Json = nlohmann::ordered_json;

/// %.12g, the precision of every floating-point output.
std::string fmt12(double v);
/// v rounded to 12 significant digits, so JSON dumps agree with the CSV text.
double round12(double v);

std::uint64_t fnv1a(std::string_view bytes);
std::string hex64(std::uint64_t v);

Json to_json(const ThresholdReport& t);
Json to_json(const RungResult& r);
Json to_json(const SpectrumReport& r);
Json to_json(const SymmetryReport& r);
Json to_json(const SeparationReport& r);
Json to_json(const CertificateResult& c);
Json to_json(const BForm& f);
Json to_json(const PrismCheck& c);

/// Columns: beta, mode, rung, L, nx, n1, n2, j, lambda, residual, below_threshold, flags.
void write_csv_header(std::ostream& out);
/// Extrapolated spectrum at the final length (rung "extrapolated"). In reduced mode every y1
/// mode k >= 2 that lands below threshold gets its own row flagged y1_mode=k.
void write_extrapolated_csv(std::ostream& out, const SpectrumReport& r);
/// Raw Ritz values of every solve in the ladder; below_threshold compares against E1 directly.
void write_rungs_csv(std::ostream& out, const SpectrumReport& r);

/// Hash of the canonical config dump; versions of the code and its dependencies.
Json make_manifest(const std::string& command, const Json& config, std::uint64_t seed, const Json& outputs);

}  // namespace shearguide
