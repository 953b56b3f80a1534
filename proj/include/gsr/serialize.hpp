#ifndef GSR_SERIALIZE_HPP
#define GSR_SERIALIZE_HPP

#include <json.hpp>

#include "gsr/assemble.hpp"
#include "gsr/bench.hpp"
#include "gsr/detect.hpp"
#include "gsr/fit.hpp"

namespace gsr {

// Key order is fixed; non-finite reals become null. Block and factor
// indices are 1-based like variable indices.
using Json = nlohmann::ordered_json;

Json to_json(const GsStructure& s);
Json to_json(const FactorModel& m);
Json to_json(const AssembledModel& m);
/// Wall time is left out unless `timing` is set, so that reports of equal
/// runs compare equal.
Json to_json(const CaseReport& r, bool timing = true);
Json to_json(const SuiteReport& s, bool timing = true);

/// Plain-text table of a suite, one line per case.
std::string format_table(const SuiteReport& s, bool timing = true);

} // namespace gsr

#endif
