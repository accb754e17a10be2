#include "mosacd/prompt.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <regex>
#include <sstream>

#include "mosacd/error.hpp"

namespace mosacd {

namespace {

constexpr std::string_view kFullTemplate = R"TPL(You are a senior researcher in causal discovery. We are studying the following dataset:

{data_desc}

The two target variables under review are {u} and {v}.

Conditional-independence tests mentioning these variables:

{ci_bullets}

Neighbour chain(s) that must normally remain non-collider:

{chains}

The nodes involved are described as below: 

{node_desc}

Choose one explanation that best fits domain knowledge and/or decides a CI test is unreliable (avoid selecting D or E unless other options are strongly against common sense):

A. Undecided. We don't know enough to confidently pick a directionality.
B. Changing the state of {u} causally affects {v}, and {v} causally affects {u_theOther_2v}.
C. Changing the state of {v} causally affects {u}, and {u} causally affects {v_theOther_2u}.
D. Changing the state of {u} causally affects {v}, and {u_theOther_2v} also causally affects {v}, **violating corresponding CI tests**.
E. Changing the state of {v} causally affects {u}, and {v_theOther_2u} also causally affects {u}, **violating corresponding CI tests**.

Think step-by-step before selecting:
1. Mechanisms - What known causal pathways (biological, physical, etc.) support each direction?
2. Counterfactual test - What would happen if we intervened on one node? What would we expect?
3. Empirical check - Point to one key piece of information that favors/weakens a direction.
4. Comparison - Briefly weigh A vs B vs C vs D vs E and choose the most plausible.

Return exactly three lines:
1. Reasoning in support of one direction.
2. Reasoning against the weaker/less plausible direction.
3. Final choice:  <Answer>A/B/C/D/E</Answer> )TPL";

constexpr std::string_view kNone2uTemplate = R"TPL(You are a senior researcher in causal discovery. We are studying the following dataset:

{data_desc}

The two target variables under review are {u} and {v}.

Conditional-independence tests mentioning these variables:

{ci_bullets}

Neighbour chain(s) that must normally remain non-collider:

{chains}

The nodes involved are described as below: 

{node_desc}

Choose one explanation that best fits domain knowledge and/or decides a CI test is unreliable (avoid selecting D unless other options are strongly against common sense):

A. Undecided. We don't know enough to confidently pick a directionality.
B. Changing the state of {u} causally affects {v}, and {v} causally affects {u_theOther_2v}.
C. Changing the state of {v} causally affects {u}.
D. Changing the state of {u} causally affects {v}, and {u_theOther_2v} also causally affects {v}, **violating corresponding CI tests**.

Think step-by-step before selecting:
1. Mechanisms - What known causal pathways (biological, physical, etc.) support each direction?
2. Counterfactual test - What would happen if we intervened on one node? What would we expect?
3. Empirical check - Point to one key piece of information that favors/weakens a direction.
4. Comparison - Briefly weigh A vs B vs C vs D and choose the most plausible.

Return exactly three lines:
1. Reasoning in support of one direction.
2. Reasoning against the weaker/less plausible direction.
3. Final choice:  <Answer>A/B/C/D</Answer> )TPL";

constexpr std::string_view kNone2vTemplate = R"TPL(You are a senior researcher in causal discovery. We are studying the following dataset:

{data_desc}

The two target variables under review are {u} and {v}.

Conditional-independence tests mentioning these variables:

{ci_bullets}

Neighbour chain(s) that must normally remain non-collider:

{chains}

The nodes involved are described as below: 

{node_desc}

Choose one explanation that best fits domain knowledge and/or decides a CI test is unreliable (avoid selecting D unless other options are strongly against common sense):

A. Undecided. We don't know enough to confidently pick a directionality.
B. Changing the state of {u} causally affects {v}.
C. Changing the state of {v} causally affects {u}, and {u} causally affects {v_theOther_2u}.
D. Changing the state of {v} causally affects {u}, and {v_theOther_2u} also causally affects {u}, **violating corresponding CI tests**.

Think step-by-step before selecting:
1. Mechanisms - What known causal pathways (biological, physical, etc.) support each direction?
2. Counterfactual test - What would happen if we intervened on one node? What would we expect?
3. Empirical check - Point to one key piece of information that favors/weakens a direction.
4. Comparison - Briefly weigh A vs B vs C vs D and choose the most plausible.

Return exactly three lines:
1. Reasoning in support of one direction.
2. Reasoning against the weaker/less plausible direction.
3. Final choice:  <Answer>A/B/C/D</Answer> )TPL";

constexpr std::string_view kNoneTemplate = R"TPL(You are a senior researcher in causal discovery. We are studying the following dataset:

{data_desc}

The two target variables under review are {u} and {v}.

The nodes involved are described as below: 

{node_desc}

Choose one explanation that best fits domain knowledge:

A. Undecided. We don't know enough to confidently pick a directionality.
B. Changing the state of {u} causally affects {v}.
C. Changing the state of {v} causally affects {u}.

Think step-by-step before selecting:
1. Mechanisms - What known causal pathways (biological, physical, etc.) support each direction?
2. Counterfactual test - What would happen if we intervened on one node? What would we expect?
3. Empirical check - Point to one key piece of information that favors/weakens a direction.
4. Comparison - Briefly weigh A vs B vs C and choose the most plausible.

Return exactly three lines:
1. Reasoning in support of one direction.
2. Reasoning against the weaker/less plausible direction.
3. Final choice:  <Answer>A/B/C</Answer> )TPL";

std::string format_p(double p) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", p);
    return buf;
}

std::string join_names(std::span<const NodeId> ids, std::span<const std::string> names) {
    if (ids.empty()) return "the empty set";
    std::string out = "{";
    for (std::size_t i = 0; i < ids.size(); ++i) out += (i ? ", " : "") + names[ids[i]];
    return out + "}";
}

/// Swaps the text after "B. " / "C. " (and "D. " / "E. ") line prefixes.
std::string swap_options(std::string_view tmpl, bool swap_de) {
    std::vector<std::string> lines;
    std::string cur;
    for (char c : tmpl) {
        if (c == '\n') {
            lines.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    lines.push_back(std::move(cur));
    auto find_line = [&](char letter) -> std::string* {
        const std::string prefix = std::string(1, letter) + ". ";
        for (auto& l : lines)
            if (l.rfind(prefix, 0) == 0) return &l;
        return nullptr;
    };
    auto swap_bodies = [&](char a, char b) {
        std::string* la = find_line(a);
        std::string* lb = find_line(b);
        if (!la || !lb) throw InvariantError("template lacks option lines to swap");
        const std::string body_a = la->substr(3);
        *la = la->substr(0, 3) + lb->substr(3);
        *lb = lb->substr(0, 3) + body_a;
    };
    swap_bodies('B', 'C');
    if (swap_de) swap_bodies('D', 'E');
    std::string out;
    for (std::size_t i = 0; i < lines.size(); ++i) out += (i ? "\n" : "") + lines[i];
    return out;
}

}  // namespace

std::string to_string(TemplateVariant v) {
    switch (v) {
        case TemplateVariant::Full: return "Full";
        case TemplateVariant::None2u: return "None2u";
        case TemplateVariant::None2v: return "None2v";
        case TemplateVariant::None: return "None";
    }
    return "?";
}

std::string to_string(AnswerOrder o) { return o == AnswerOrder::Forward ? "forward" : "reversed"; }

std::string to_string(Claim c) {
    switch (c) {
        case Claim::Undecided: return "undecided";
        case Claim::UToV: return "u->v";
        case Claim::VToU: return "v->u";
    }
    return "?";
}

std::string_view template_text(TemplateVariant variant) {
    switch (variant) {
        case TemplateVariant::Full: return kFullTemplate;
        case TemplateVariant::None2u: return kNone2uTemplate;
        case TemplateVariant::None2v: return kNone2vTemplate;
        case TemplateVariant::None: return kNoneTemplate;
    }
    throw InvariantError("unknown template variant");
}

std::string fill_template(std::string_view tmpl, const std::map<std::string, std::string>& values) {
    std::string out;
    out.reserve(tmpl.size() * 2);
    std::size_t i = 0;
    while (i < tmpl.size()) {
        if (tmpl[i] == '{') {
            const std::size_t close = tmpl.find('}', i);
            if (close == std::string_view::npos) throw TemplateError("unterminated placeholder in template");
            const std::string key(tmpl.substr(i + 1, close - i - 1));
            auto it = values.find(key);
            if (it == values.end()) throw TemplateError("no value for placeholder {" + key + "}");
            out += it->second;
            i = close + 1;
        } else {
            out += tmpl[i++];
        }
    }
    return out;
}

std::string render_prompt(const ExpertQuery& q, AnswerOrder order) {
    std::map<std::string, std::string> values{{"u", q.u_name},
                                              {"v", q.v_name},
                                              {"data_desc", q.data_desc},
                                              {"node_desc", q.node_desc}};
    if (q.variant != TemplateVariant::None) {
        values["ci_bullets"] = q.ci_bullets;
        values["chains"] = q.chains;
    }
    if (q.u_the_other_2v) values["u_theOther_2v"] = *q.u_the_other_2v;
    if (q.v_the_other_2u) values["v_theOther_2u"] = *q.v_the_other_2u;
    const std::string_view tmpl = template_text(q.variant);
    if (order == AnswerOrder::Forward) return fill_template(tmpl, values);
    return fill_template(swap_options(tmpl, q.variant == TemplateVariant::Full), values);
}

std::string_view option_letters(TemplateVariant variant) {
    switch (variant) {
        case TemplateVariant::Full: return "ABCDE";
        case TemplateVariant::None2u:
        case TemplateVariant::None2v: return "ABCD";
        case TemplateVariant::None: return "ABC";
    }
    return "A";
}

Claim claim_of(TemplateVariant variant, AnswerOrder order, char letter) {
    letter = static_cast<char>(std::toupper(static_cast<unsigned char>(letter)));
    if (option_letters(variant).find(letter) == std::string_view::npos || letter == 'A') return Claim::Undecided;
    // Claims of the forward listing.
    Claim claim = Claim::Undecided;
    switch (variant) {
        case TemplateVariant::Full: claim = (letter == 'B' || letter == 'D') ? Claim::UToV : Claim::VToU; break;
        case TemplateVariant::None2u: claim = (letter == 'C') ? Claim::VToU : Claim::UToV; break;
        case TemplateVariant::None2v: claim = (letter == 'B') ? Claim::UToV : Claim::VToU; break;
        case TemplateVariant::None: claim = (letter == 'B') ? Claim::UToV : Claim::VToU; break;
    }
    if (order == AnswerOrder::Forward) return claim;
    // Reversed swaps B<->C always and D<->E in Full; D of the restricted variants stays put.
    const bool swapped = letter == 'B' || letter == 'C' || variant == TemplateVariant::Full;
    if (!swapped) return claim;
    return claim == Claim::UToV ? Claim::VToU : Claim::UToV;
}

char letter_for(TemplateVariant variant, AnswerOrder order, Claim claim) {
    if (claim == Claim::Undecided) return 'A';
    for (char c : std::string_view("BC"))
        if (claim_of(variant, order, c) == claim) return c;
    throw InvariantError("no option carries the requested claim");
}

std::optional<char> parse_answer(std::string_view text) {
    static const std::regex re(R"(<\s*answer\s*>\s*([ABCDE])\s*<\s*/\s*answer\s*>)", std::regex::icase);
    std::match_results<std::string_view::const_iterator> m;
    if (!std::regex_search(text.begin(), text.end(), m, re)) return std::nullopt;
    return static_cast<char>(std::toupper(static_cast<unsigned char>(*m[1].first)));
}

std::optional<NodeId> the_other(const Pdag& p, const SepsetRecord& sigma, NodeId from, NodeId to) {
    std::optional<NodeId> best;
    double best_p = -1.0;
    for (NodeId w : p.neighbors(to)) {
        if (w == from || p.adjacent(w, from)) continue;
        if (sigma.membership(from, w, to) != Membership::All) continue;
        const double mp = sigma.max_p(from, w);
        if (mp > best_p) {
            best_p = mp;
            best = w;
        }
    }
    return best;
}

ExpertQuery build_query(const Pdag& p, const SepsetRecord& sigma, std::span<const std::string> names,
                        const Metadata& meta, NodeId u, NodeId v) {
    if (static_cast<int>(names.size()) != p.node_count()) throw InputError("name table does not match graph");
    if (!p.is_undirected(u, v)) throw StateError("expert queries need an undirected edge");
    ExpertQuery q;
    q.u = u;
    q.v = v;
    q.u_name = names[u];
    q.v_name = names[v];
    q.data_desc = meta.data_desc;

    const auto u_other = the_other(p, sigma, u, v);
    const auto v_other = the_other(p, sigma, v, u);
    if (u_other) q.u_the_other_2v = names[*u_other];
    if (v_other) q.v_the_other_2u = names[*v_other];
    if (u_other && v_other)
        q.variant = TemplateVariant::Full;
    else if (u_other)
        q.variant = TemplateVariant::None2u;
    else if (v_other)
        q.variant = TemplateVariant::None2v;
    else
        q.variant = TemplateVariant::None;

    std::ostringstream bullets;
    bool first = true;
    for (const auto& [pair, list] : sigma.entries()) {
        if (pair.first != u && pair.second != u && pair.first != v && pair.second != v) continue;
        for (const auto& e : list) {
            bullets << (first ? "" : "\n") << "- " << names[pair.first] << " is independent of " << names[pair.second]
                    << " given " << join_names(e.set, names) << " (p = " << format_p(e.p_value) << ")";
            first = false;
        }
    }
    q.ci_bullets = first ? "- none" : bullets.str();

    std::ostringstream chains;
    first = true;
    for (const auto& t : unshielded_triples(p)) {
        if (t.z != u && t.z != v) continue;
        if (sigma.membership(t.x, t.y, t.z) != Membership::All) continue;
        chains << (first ? "" : "\n") << "- " << names[t.x] << " - " << names[t.z] << " - " << names[t.y];
        first = false;
    }
    q.chains = first ? "- none" : chains.str();

    std::vector<NodeId> involved{u, v};
    if (u_other) involved.push_back(*u_other);
    if (v_other) involved.push_back(*v_other);
    std::ostringstream desc;
    for (std::size_t i = 0; i < involved.size(); ++i)
        desc << (i ? "\n" : "") << "- " << names[involved[i]] << ": " << meta.describe(names[involved[i]]);
    q.node_desc = desc.str();
    return q;
}

}  // namespace mosacd
