#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mosacd/graph.hpp"
#include "mosacd/metadata.hpp"
#include "mosacd/skeleton.hpp"

namespace mosacd {

/// Full: both ancillary chains exist. None2u: only {u_theOther_2v}. None2v: only
/// {v_theOther_2u}. None: no chain context at all.
enum class TemplateVariant { Full, None2u, None2v, None };
enum class AnswerOrder { Forward, Reversed };

/// Which causal direction a letter claims for the queried pair {u, v}.
enum class Claim { Undecided, UToV, VToU };

std::string to_string(TemplateVariant v);
std::string to_string(AnswerOrder o);
std::string to_string(Claim c);

/// Raw template text (placeholders in braces, no trailing newline).
std::string_view template_text(TemplateVariant variant);

/// Replaces every {name} with values.at(name). Throws TemplateError naming the first
/// placeholder without a value.
std::string fill_template(std::string_view tmpl, const std::map<std::string, std::string>& values);

struct ExpertQuery {
    NodeId u = 0;
    NodeId v = 0;
    std::string u_name;
    std::string v_name;
    std::string data_desc;
    std::string node_desc;
    std::string ci_bullets;
    std::string chains;
    std::optional<std::string> u_the_other_2v;
    std::optional<std::string> v_the_other_2u;
    TemplateVariant variant = TemplateVariant::None;
};

/// Renders the variant's template. Reversed swaps the bodies of B and C (and of D and E
/// in Full); A stays first.
std::string render_prompt(const ExpertQuery& q, AnswerOrder order);

/// Letters offered by the variant, "ABC" up to "ABCDE".
std::string_view option_letters(TemplateVariant variant);

/// Direction a letter stands for in the rendered order; Undecided for A or foreign letters.
Claim claim_of(TemplateVariant variant, AnswerOrder order, char letter);

/// First letter claiming `claim` without the CI-violating wording.
char letter_for(TemplateVariant variant, AnswerOrder order, Claim claim);

/// First <Answer>X</Answer> tag, case-insensitive, whitespace allowed inside the tags.
std::optional<char> parse_answer(std::string_view text);

/// Node w adjacent to `to` but not to `from`, with `to` in every recorded sepset of
/// {from, w}: the chain from -> to -> w must stay a non-collider. Picks the strongest
/// (largest max p, then smallest id) candidate.
std::optional<NodeId> the_other(const Pdag& p, const SepsetRecord& sigma, NodeId from, NodeId to);

/// Context for one undirected edge: Sigma entries touching u or v, non-collider chains
/// through u or v, node descriptions and the variant choice.
ExpertQuery build_query(const Pdag& p, const SepsetRecord& sigma, std::span<const std::string> names,
                        const Metadata& meta, NodeId u, NodeId v);

}  // namespace mosacd
