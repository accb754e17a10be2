#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "mosacd/prompt.hpp"

namespace fixture {

inline std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// The values the golden prompt files were rendered with.
inline mosacd::ExpertQuery chest_clinic_query(mosacd::TemplateVariant variant) {
    mosacd::ExpertQuery q;
    q.u_name = "smoke";
    q.v_name = "lung";
    q.data_desc = "Patients seen at a chest clinic.";
    q.ci_bullets =
        "- smoke is independent of asia given the empty set (p = 0.4210)\n"
        "- lung is independent of bronc given {smoke} (p = 0.8123)";
    q.chains = "- lung - smoke - bronc";
    q.node_desc =
        "- smoke: Whether the patient smokes.\n- lung: Whether the patient has lung cancer.\n"
        "- bronc: Whether the patient has bronchitis.\n- either: Whether the patient has tuberculosis or lung cancer.";
    q.u_the_other_2v = "either";
    q.v_the_other_2u = "bronc";
    q.variant = variant;
    return q;
}

inline const char* file_key(mosacd::TemplateVariant v) {
    switch (v) {
        case mosacd::TemplateVariant::Full: return "full";
        case mosacd::TemplateVariant::None2u: return "none2u";
        case mosacd::TemplateVariant::None2v: return "none2v";
        case mosacd::TemplateVariant::None: return "none";
    }
    return "";
}

inline std::string golden_prompt_path(mosacd::TemplateVariant v, mosacd::AnswerOrder order) {
    return std::string(MOSACD_GOLDEN_DIR) + "/prompt_" + file_key(v) + "_" +
           (order == mosacd::AnswerOrder::Forward ? "forward" : "reversed") + ".txt";
}

}  // namespace fixture
