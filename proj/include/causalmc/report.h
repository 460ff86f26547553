#ifndef CAUSALMC_REPORT_H
#define CAUSALMC_REPORT_H

#include <string>

#include "causalmc/dpor.h"
#include "causalmc/prog.h"

namespace cmc {

/* Deterministic JSON report; wall time sits in its own stats field so the
 * rest of the document is byte-stable across runs. */
std::string report_to_json(const std::string& program_name, const Program& p,
                           const ExplorationReport& r);

std::string weak_trace_to_json(const WeakTrace& w, const Program& p);
WeakTrace weak_trace_from_json(const std::string& json_text);

std::string weak_trace_to_dot(const WeakTrace& w, const Program& p);
std::string trace_to_dot(const Trace& tr, const Program& p);

uint64_t weak_trace_hash(const WeakTrace& w, const Program& p);

}  // namespace cmc

#endif
