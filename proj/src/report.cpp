#include "morseflow/report.hpp"

#include <json.hpp>

#include <cmath>
#include <sstream>

namespace morseflow {

using nlohmann::json;

namespace {

json vec_to_json(const Vec& v) {
    json a = json::array();
    for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

json crit_to_json(const CriticalPoint& c) {
    json j;
    j["label"] = c.label;
    j["location"] = vec_to_json(c.location);
    j["value"] = c.value;
    j["index"] = c.morse_index;
    j["eigenvalues"] = c.hessian_eigenvalues;
    j["sylvester"] = {c.sylvester.n_minus, c.sylvester.n_zero, c.sylvester.n_plus};
    j["degenerate"] = c.degenerate;
    return j;
}

json count_to_json(const ModuliCount& mc) {
    json j;
    j["source"] = mc.source;
    j["target"] = mc.target;
    j["count"] = mc.count;
    j["count_mod2"] = mc.count_mod2;
    j["method"] = mc.method;
    j["witnesses"] = mc.witnesses.size();
    return j;
}

json complex_to_json(const ChainComplexGF2& cx) {
    json j;
    json gens = json::array();
    for (int k = 0; k <= cx.max_degree(); ++k) {
        json degree = json::array();
        for (const auto& g : cx.generators[size_t(k)])
            degree.push_back({{"label", g.label}, {"value", g.value}});
        gens.push_back(degree);
    }
    j["generators"] = gens;
    json bnd = json::array();
    for (int k = 0; k <= cx.max_degree(); ++k) bnd.push_back(cx.boundary[size_t(k)].to_rows01());
    j["boundary"] = bnd;
    return j;
}

} // namespace

std::string report_to_json(const Report& rep, bool include_timing) {
    json j;
    j["scene"] = rep.scene;
    j["exit_status"] = rep.exit_status;
    j["warnings"] = rep.warnings;

    if (!rep.criticals.empty()) {
        json crits = json::array();
        for (const auto& c : rep.criticals) crits.push_back(crit_to_json(c));
        j["critical_points"] = crits;
        j["euler_characteristic"] = rep.euler_characteristic;
        j["search"] = {{"seeds", rep.search_stats.seeds},
                       {"converged", rep.search_stats.converged},
                       {"dropped", rep.search_stats.dropped},
                       {"distinct", rep.search_stats.distinct}};
    }
    if (!rep.quotient_classes.empty()) {
        json cls = json::array();
        for (const auto& c : rep.quotient_classes) {
            json e;
            e["label"] = c.representative.label;
            e["orbit"] = json::array();
            for (const auto& p : c.orbit) e["orbit"].push_back(p.label);
            cls.push_back(e);
        }
        j["quotient_classes"] = cls;
    }
    if (!rep.counts.empty()) {
        json counts = json::array();
        for (const auto& mc : rep.counts) counts.push_back(count_to_json(mc));
        j["moduli_counts"] = counts;
    }
    if (!rep.cover_counts.empty()) {
        json counts = json::array();
        for (const auto& mc : rep.cover_counts) counts.push_back(count_to_json(mc));
        j["covering_counts"] = counts;
    }
    if (!rep.scans.empty()) {
        json scans = json::array();
        for (const auto& s : rep.scans) {
            json e;
            e["source"] = s.source;
            e["bottom"] = s.bottom;
            e["transitions"] = json::array();
            for (const auto& t : s.transitions)
                e["transitions"].push_back({{"angle", t.angle},
                                            {"saddle", t.saddle},
                                            {"side_lo", t.side_lo_label},
                                            {"side_hi", t.side_hi_label},
                                            {"second_leg_ok", t.second_leg_ok}});
            e["boundary_events"] = s.boundary_events;
            e["events_even"] = s.events_even();
            scans.push_back(e);
        }
        j["scans"] = scans;
    }
    if (rep.has_complex) {
        j["complex"] = complex_to_json(rep.complex);
        j["boundary_squared_ok"] = rep.boundary_check.ok;
        if (!rep.boundary_check.ok) j["boundary_failure_degree"] = rep.boundary_check.offending_degree;
    }
    if (rep.has_homology) {
        j["betti"] = rep.homol.betti;
        json reps = json::array();
        for (int k = 0; k < int(rep.homol.representatives.size()); ++k) {
            json degree = json::array();
            for (const auto& v : rep.homol.representatives[size_t(k)]) {
                // representative as the labels of its support
                json gens = json::array();
                for (int i = 0; i < v.size(); ++i)
                    if (v.get(i)) gens.push_back(rep.complex.generators[size_t(k)][size_t(i)].label);
                degree.push_back(gens);
            }
            reps.push_back(degree);
        }
        j["homology_representatives"] = reps;
        j["morse_inequality"] = {{"ok", rep.morse_check.ok}, {"slack", rep.morse_check.slack}};
    }
    if (rep.has_spectral) {
        json sp;
        sp["spectrum"] = rep.spectral.spectrum;
        sp["homological_spectrum"] = rep.spectral.homological_spectrum;
        sp["action_gap"] = rep.spectral.singleton_spectrum
                               ? json("infinity")
                               : json(rep.spectral.action_gap);
        json cls = json::array();
        for (const auto& c : rep.spectral.classes)
            cls.push_back({{"degree", c.degree}, {"sigma", c.sigma}, {"witness", c.witness}});
        sp["classes"] = cls;
        j["spectral"] = sp;
    }
    if (include_timing) j["elapsed_seconds"] = rep.elapsed_seconds;
    return j.dump(2) + "\n";
}

std::string critical_table_csv(const std::vector<CriticalPoint>& crits) {
    std::ostringstream os;
    os.precision(17);
    os << "label,coordinates,value,index,eigenvalues,degenerate\n";
    for (const auto& c : crits) {
        os << c.label << ",\"";
        for (int i = 0; i < c.location.size(); ++i) os << (i ? " " : "") << c.location[i];
        os << "\"," << c.value << "," << c.morse_index << ",\"";
        for (size_t i = 0; i < c.hessian_eigenvalues.size(); ++i)
            os << (i ? " " : "") << c.hessian_eigenvalues[i];
        os << "\"," << (c.degenerate ? 1 : 0) << "\n";
    }
    return os.str();
}

std::string flow_line_csv(const FlowLine& line) {
    std::ostringstream os;
    os.precision(17);
    os << "s";
    if (!line.samples.empty())
        for (int i = 0; i < line.samples.front().p.size(); ++i) os << ",x" << i;
    os << "\n";
    for (const auto& smp : line.samples) {
        os << smp.s;
        for (int i = 0; i < smp.p.size(); ++i) os << "," << smp.p[i];
        os << "\n";
    }
    return os.str();
}

std::string scan_angles_csv(const ModuliScan& scan) {
    std::ostringstream os;
    os.precision(17);
    os << "angle,endpoint\n";
    for (size_t i = 0; i < scan.angles.size(); ++i)
        os << scan.angles[i] << "," << scan.endpoint_labels[i] << "\n";
    return os.str();
}

std::string scan_transitions_csv(const ModuliScan& scan) {
    std::ostringstream os;
    os.precision(17);
    os << "angle,saddle\n";
    for (const auto& t : scan.transitions) os << t.angle << "," << t.saddle << "\n";
    return os.str();
}

} // namespace morseflow
