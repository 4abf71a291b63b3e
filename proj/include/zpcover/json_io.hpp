#pragma once

#include "json.hpp"

#include "zpcover/alon_alweiss.hpp"
#include "zpcover/bounds.hpp"
#include "zpcover/certify.hpp"
#include "zpcover/constructions.hpp"
#include "zpcover/family.hpp"
#include "zpcover/prophet.hpp"
#include "zpcover/zp_core.hpp"

namespace zpcover {

inline void to_json(nlohmann::json& j, const PairFailure& f) {
    j = {{"v_index", f.v_index}, {"w_index", f.w_index}, {"missing", f.missing}};
}

// elapsed_seconds stays out of the JSON form: serialized artifacts must be
// byte-identical across runs with the same seed and inputs.
inline void to_json(nlohmann::json& j, const CoverageReport& r) {
    j = {{"is_covering", r.is_covering}, {"checked_pairs", r.checked_pairs}};
    if (r.first_failure)
        j["first_failure"] = *r.first_failure;
    else
        j["first_failure"] = nullptr;
}

inline void to_json(nlohmann::json& j, const CoverSet& s) {
    j = s.members();
}

inline void to_json(nlohmann::json& j, const ParameterSelection& s) {
    j = {{"p", s.p},           {"log2N", s.log2N},
         {"k", s.k},           {"ell1", s.ell1},
         {"ell2", s.ell2},     {"sizeS_bound", s.sizeS_bound},
         {"ell3_bound", s.ell3_bound}, {"ell_star", s.ell_star}};
}

inline void to_json(nlohmann::json& j, const ScalingSet& s) {
    j = {{"p", s.p},
         {"k", s.k},
         {"elements", s.elements},
         {"greedy_fallback", s.greedy_fallback},
         {"sampled_bound", s.sampled_bound}};
}

inline void to_json(nlohmann::json& j, const StageReport& s) {
    j = {{"stage", s.stage},
         {"size", s.size},
         {"ell", s.ell},
         {"cover", s.cover},
         {"report", s.report}};
}

inline void to_json(nlohmann::json& j, const PipelineStats& s) {
    j = {{"p", s.p},
         {"N", s.N},
         {"k", s.k},
         {"ell1", s.ell1},
         {"ell2", s.ell2},
         {"ell3", s.ell3},
         {"ell_star", s.ell_star},
         {"base", s.base},
         {"seed", s.seed},
         {"desk_scale_base", s.desk_scale_base},
         {"stage_reports", s.stage_reports}};
}

inline void to_json(nlohmann::json& j, const IterationStep& s) {
    j = {{"z", s.z},
         {"a", s.a},
         {"K", s.parts},
         {"min_part_size", s.min_part_size},
         {"paper_part_bound", s.paper_part_bound},
         {"size", s.size},
         {"length", s.length},
         {"verified", s.verified}};
}

inline void to_json(nlohmann::json& j, const IterationTrace& t) {
    j = {{"p", t.p}, {"alpha", t.alpha}, {"ell0", t.ell0}, {"m", t.m}, {"steps", t.steps}};
}

inline void to_json(nlohmann::json& j, const ColoringCertificate& c) {
    j = {{"p", c.p}, {"r", c.r}, {"q", c.q}, {"colorings", c.colorings}};
}

inline ColoringCertificate certificate_from_json(const nlohmann::json& j) {
    ColoringCertificate c;
    c.p = j.at("p").get<int>();
    c.r = j.at("r").get<int>();
    c.q = j.at("q").get<int>();
    c.colorings = j.at("colorings").get<std::vector<std::vector<int>>>();
    return c;
}

inline void to_json(nlohmann::json& j, const MatroidExport& m) {
    j = {{"q", m.q},
         {"elements", m.r * m.p},
         {"p", m.p},
         {"r", m.r},
         {"partitions", m.partitions},
         {"hyperedges", m.hyperedges}};
}

inline void to_json(nlohmann::json& j, const McEstimate& e) {
    j = {{"estimate", e.estimate},
         {"ci_half_width", e.ci_half_width},
         {"samples", e.samples},
         {"seed", e.seed}};
}

inline void to_json(nlohmann::json& j, const ValueReport& r) {
    j = {{"p", r.p},
         {"r", r.r},
         {"prophet_exact", r.prophet_exact},
         {"gambler_exact", r.gambler_exact},
         {"ratio", r.ratio},
         {"r_is_p_pow_p", r.r_is_p_pow_p},
         {"gambler_ub", r.gambler_ub},
         {"bounds_pass", r.bounds_pass}};
    j["prophet_mc"] = r.prophet_mc ? nlohmann::json(*r.prophet_mc) : nlohmann::json(nullptr);
    j["gambler_mc"] = r.gambler_mc ? nlohmann::json(*r.gambler_mc) : nlohmann::json(nullptr);
    j["prophet_lb"] = r.prophet_lb ? nlohmann::json(*r.prophet_lb) : nlohmann::json(nullptr);
    j["ratio_lb"] = r.ratio_lb ? nlohmann::json(*r.ratio_lb) : nlohmann::json(nullptr);
}

inline void to_json(nlohmann::json& j, const BoundReport& r) {
    j = {{"p", r.p},
         {"log2N", r.log2N},
         {"lower", r.lower},
         {"upper_trivial", r.upper_trivial},
         {"consistent", r.consistent}};
    j["upper_pipeline"] =
        r.upper_pipeline ? nlohmann::json(*r.upper_pipeline) : nlohmann::json(nullptr);
}

inline void to_json(nlohmann::json& j, const AgnosticWitness& w) {
    j = {{"k", w.k},
         {"z", w.z},
         {"kprime", w.kprime},
         {"alphas", w.alphas},
         {"h", w.h},
         {"slots_with_h", w.slots_with_h},
         {"certified_exponent", w.certified_exponent}};
    nlohmann::json slots = nlohmann::json::array();
    for (const auto& s : w.slot_sets) slots.push_back(s.members());
    j["slot_sets"] = slots;
}

}  // namespace zpcover
