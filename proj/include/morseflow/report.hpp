#ifndef MORSEFLOW_REPORT_HPP
#define MORSEFLOW_REPORT_HPP

#include "morseflow/pipeline.hpp"

#include <string>

namespace morseflow {

// Structured key-value report; timing only on request so files are
// byte-identical across runs.
std::string report_to_json(const Report& rep, bool include_timing = false);

// Critical-point table: label, coordinates, value, index, eigenvalues, flag.
std::string critical_table_csv(const std::vector<CriticalPoint>& crits);

// Flow-line table (s, coordinates...) for external plotting.
std::string flow_line_csv(const FlowLine& line);

// Scan tables: (angle, endpoint label) and (angle, saddle label).
std::string scan_angles_csv(const ModuliScan& scan);
std::string scan_transitions_csv(const ModuliScan& scan);

} // namespace morseflow

#endif
