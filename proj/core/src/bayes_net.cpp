#include "mosacd/bayes_net.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <unordered_map>

#include "mosacd/error.hpp"

namespace mosacd {

int BayesNet::find(std::string_view variable) const {
    for (int i = 0; i < size(); ++i)
        if (variables[i].name == variable) return i;
    return -1;
}

std::vector<std::string> BayesNet::names() const {
    std::vector<std::string> out;
    for (const auto& v : variables) out.push_back(v.name);
    return out;
}

std::size_t BayesNet::config_count(NodeId v) const {
    std::size_t count = 1;
    for (NodeId p : variables.at(v).parents) count *= variables.at(p).states.size();
    return count;
}

Dag BayesNet::dag() const {
    std::vector<Edge> edges;
    for (int v = 0; v < size(); ++v)
        for (NodeId p : variables[v].parents) edges.push_back({p, v});
    return Dag(size(), edges);
}

void BayesNet::validate(double row_tolerance) const {
    for (int v = 0; v < size(); ++v) {
        const auto& var = variables[v];
        if (var.states.empty()) throw ParseError("variable '" + var.name + "' has no states");
        for (NodeId p : var.parents)
            if (p < 0 || p >= size()) throw ParseError("variable '" + var.name + "' has an unknown parent");
        const std::size_t k = var.states.size();
        const std::size_t rows = config_count(v);
        if (var.cpt.size() != rows * k)
            throw ParseError("variable '" + var.name + "' expects " + std::to_string(rows * k) +
                             " probabilities, found " + std::to_string(var.cpt.size()));
        for (std::size_t r = 0; r < rows; ++r) {
            double sum = 0.0;
            for (std::size_t s = 0; s < k; ++s) {
                const double x = var.cpt[r * k + s];
                if (!(x >= 0.0)) throw ParseError("negative probability for '" + var.name + "'");
                sum += x;
            }
            if (std::abs(sum - 1.0) > row_tolerance)
                throw ParseError("probability row " + std::to_string(r) + " of '" + var.name +
                                 "' sums to " + std::to_string(sum));
        }
    }
    try {
        (void)dag();
    } catch (const InputError& e) {
        throw ParseError(std::string("parent graph is not acyclic: ") + e.what());
    }
}

// ---------------------------------------------------------------------------
// BIF parsing

namespace {

struct Token {
    enum Kind { Word, Punct, String, End } kind;
    std::string text;
    int line;
    int column;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    Token next() {
        skip_space_and_comments();
        Token t{Token::End, "", line_, col_};
        if (pos_ >= src_.size()) return t;
        const char c = src_[pos_];
        if (is_punct(c)) {
            t.kind = Token::Punct;
            t.text = std::string(1, c);
            advance();
            return t;
        }
        if (c == '"') {
            t.kind = Token::String;
            advance();
            while (pos_ < src_.size() && src_[pos_] != '"') {
                t.text += src_[pos_];
                advance();
            }
            if (pos_ >= src_.size()) throw ParseError("unterminated string", t.line, t.column);
            advance();
            return t;
        }
        t.kind = Token::Word;
        while (pos_ < src_.size() && !std::isspace(static_cast<unsigned char>(src_[pos_])) &&
               !is_punct(src_[pos_]) && src_[pos_] != '"') {
            t.text += src_[pos_];
            advance();
        }
        return t;
    }

private:
    static bool is_punct(char c) {
        return c == '{' || c == '}' || c == '(' || c == ')' || c == '[' || c == ']' || c == ',' ||
               c == ';' || c == '|';
    }

    void advance() {
        if (src_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    void skip_space_and_comments() {
        for (;;) {
            while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) advance();
            if (src_.substr(pos_, 2) == "//") {
                while (pos_ < src_.size() && src_[pos_] != '\n') advance();
            } else if (src_.substr(pos_, 2) == "/*") {
                const int l = line_, c = col_;
                advance();
                advance();
                while (pos_ < src_.size() && src_.substr(pos_, 2) != "*/") advance();
                if (pos_ >= src_.size()) throw ParseError("unterminated comment", l, c);
                advance();
                advance();
            } else {
                return;
            }
        }
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

class BifParser {
public:
    explicit BifParser(std::string_view src) : lexer_(src) { shift(); }

    BayesNet parse() {
        BayesNet net;
        std::vector<bool> has_table;
        std::unordered_map<std::string, int> index;
        while (tok_.kind != Token::End) {
            const Token head = expect_word();
            if (head.text == "network") {
                net.name = expect_word().text;
                skip_block();
            } else if (head.text == "variable") {
                Variable var;
                const Token name = expect_word();
                var.name = name.text;
                if (index.count(var.name)) fail("variable '" + var.name + "' declared twice", name);
                parse_variable_body(var);
                index.emplace(var.name, net.size());
                net.variables.push_back(std::move(var));
                has_table.push_back(false);
            } else if (head.text == "probability") {
                parse_probability(net, index, has_table);
            } else {
                fail("expected 'network', 'variable' or 'probability', found '" + head.text + "'", head);
            }
        }
        for (int v = 0; v < net.size(); ++v)
            if (!has_table[v]) throw ParseError("variable '" + net.variables[v].name + "' has no probability block");
        return net;
    }

private:
    [[noreturn]] void fail(const std::string& msg, const Token& at) {
        throw ParseError(msg, at.line, at.column);
    }

    void shift() { tok_ = lexer_.next(); }

    Token expect_word() {
        if (tok_.kind != Token::Word) fail("expected identifier, found '" + describe(tok_) + "'", tok_);
        Token t = tok_;
        shift();
        return t;
    }

    void expect(const char* punct) {
        if (tok_.kind != Token::Punct || tok_.text != punct)
            fail(std::string("expected '") + punct + "', found '" + describe(tok_) + "'", tok_);
        shift();
    }

    bool accept(const char* punct) {
        if (tok_.kind == Token::Punct && tok_.text == punct) {
            shift();
            return true;
        }
        return false;
    }

    static std::string describe(const Token& t) { return t.kind == Token::End ? "end of input" : t.text; }

    double number() {
        const Token t = expect_word();
        double value = 0.0;
        const char* first = t.text.data();
        const char* last = first + t.text.size();
        auto [ptr, ec] = std::from_chars(first, last, value);
        if (ec != std::errc() || ptr != last) fail("expected a number, found '" + t.text + "'", t);
        return value;
    }

    void skip_property() {
        // `property` runs up to the terminating semicolon.
        while (tok_.kind != Token::End && !(tok_.kind == Token::Punct && tok_.text == ";")) shift();
        expect(";");
    }

    void skip_block() {
        expect("{");
        while (!accept("}")) {
            if (tok_.kind == Token::End) fail("unterminated block", tok_);
            const Token t = expect_word();
            if (t.text != "property") fail("unexpected '" + t.text + "' in network block", t);
            skip_property();
        }
    }

    void parse_variable_body(Variable& var) {
        expect("{");
        bool typed = false;
        while (!accept("}")) {
            const Token t = expect_word();
            if (t.text == "property") {
                skip_property();
            } else if (t.text == "type") {
                const Token kind = expect_word();
                if (kind.text != "discrete") fail("only discrete variables are supported", kind);
                expect("[");
                const Token count = expect_word();
                int k = 0;
                auto [ptr, ec] = std::from_chars(count.text.data(), count.text.data() + count.text.size(), k);
                if (ec != std::errc() || ptr != count.text.data() + count.text.size() || k < 1)
                    fail("bad state count '" + count.text + "'", count);
                expect("]");
                expect("{");
                do {
                    var.states.push_back(expect_word().text);
                } while (accept(","));
                expect("}");
                expect(";");
                if (static_cast<int>(var.states.size()) != k)
                    fail("variable '" + var.name + "' declares " + std::to_string(k) + " states but lists " +
                             std::to_string(var.states.size()),
                         count);
                typed = true;
            } else {
                fail("unexpected '" + t.text + "' in variable block", t);
            }
        }
        if (!typed) throw ParseError("variable '" + var.name + "' has no type declaration");
    }

    int lookup(const std::unordered_map<std::string, int>& index, const Token& t) {
        auto it = index.find(t.text);
        if (it == index.end()) fail("undeclared variable '" + t.text + "'", t);
        return it->second;
    }

    void parse_probability(BayesNet& net, const std::unordered_map<std::string, int>& index,
                           std::vector<bool>& has_table) {
        const Token open = tok_;
        expect("(");
        const Token child_tok = expect_word();
        const int child = lookup(index, child_tok);
        std::vector<NodeId> parents;
        if (accept("|")) {
            do {
                parents.push_back(lookup(index, expect_word()));
            } while (accept(","));
        }
        expect(")");
        if (has_table[child]) fail("second probability block for '" + child_tok.text + "'", child_tok);
        Variable& var = net.variables[child];
        var.parents = parents;
        const std::size_t k = var.states.size();
        std::size_t rows = 1;
        for (NodeId p : parents) rows *= net.variables[p].states.size();
        var.cpt.assign(rows * k, -1.0);

        expect("{");
        while (!accept("}")) {
            if (tok_.kind == Token::End) fail("unterminated probability block", open);
            if (tok_.kind == Token::Word && tok_.text == "table") {
                const Token t = tok_;
                shift();
                std::vector<double> values;
                do {
                    values.push_back(number());
                } while (accept(","));
                expect(";");
                if (values.size() != rows * k)
                    fail("table for '" + var.name + "' needs " + std::to_string(rows * k) + " values, found " +
                             std::to_string(values.size()),
                         t);
                // Child state varies slowest in a `table` listing.
                for (std::size_t s = 0; s < k; ++s)
                    for (std::size_t r = 0; r < rows; ++r) var.cpt[r * k + s] = values[s * rows + r];
            } else if (tok_.kind == Token::Word && tok_.text == "property") {
                shift();
                skip_property();
            } else if (tok_.kind == Token::Punct && tok_.text == "(") {
                const Token t = tok_;
                shift();
                std::size_t row = 0;
                std::size_t i = 0;
                do {
                    const Token s = expect_word();
                    if (i >= parents.size()) fail("too many parent states in configuration", s);
                    const auto& states = net.variables[parents[i]].states;
                    std::size_t code = states.size();
                    for (std::size_t j = 0; j < states.size(); ++j)
                        if (states[j] == s.text) code = j;
                    if (code == states.size())
                        fail("'" + s.text + "' is not a state of '" + net.variables[parents[i]].name + "'", s);
                    row = row * states.size() + code;
                    ++i;
                } while (accept(","));
                expect(")");
                if (i != parents.size()) fail("configuration lists " + std::to_string(i) + " of " +
                                                  std::to_string(parents.size()) + " parents",
                                              t);
                std::vector<double> values;
                do {
                    values.push_back(number());
                } while (accept(","));
                expect(";");
                if (values.size() != k)
                    fail("row for '" + var.name + "' needs " + std::to_string(k) + " values", t);
                for (std::size_t s = 0; s < k; ++s) var.cpt[row * k + s] = values[s];
            } else {
                fail("unsupported entry '" + describe(tok_) + "' in probability block", tok_);
            }
        }
        for (double x : var.cpt)
            if (x < 0.0) fail("probability block for '" + var.name + "' leaves configurations unset", open);
        has_table[child] = true;
    }

    Lexer lexer_;
    Token tok_{Token::End, "", 1, 1};
};

}  // namespace

BayesNet parse_bif(std::string_view text, double row_tolerance) {
    BayesNet net = BifParser(text).parse();
    net.validate(row_tolerance);
    return net;
}

BayesNet read_bif_file(const std::filesystem::path& path, double row_tolerance) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_bif(buffer.str(), row_tolerance);
}

std::string to_bif(const BayesNet& net) {
    std::ostringstream out;
    out << std::setprecision(17);
    out << "network " << net.name << " {\n}\n";
    for (const auto& var : net.variables) {
        out << "variable " << var.name << " {\n  type discrete [ " << var.states.size() << " ] { ";
        for (std::size_t i = 0; i < var.states.size(); ++i) out << (i ? ", " : "") << var.states[i];
        out << " };\n}\n";
    }
    for (int v = 0; v < net.size(); ++v) {
        const auto& var = net.variables[v];
        const std::size_t k = var.states.size();
        out << "probability ( " << var.name;
        for (std::size_t i = 0; i < var.parents.size(); ++i)
            out << (i ? ", " : " | ") << net.variables[var.parents[i]].name;
        out << " ) {\n";
        if (var.parents.empty()) {
            out << "  table ";
            for (std::size_t s = 0; s < k; ++s) out << (s ? ", " : "") << var.cpt[s];
            out << ";\n";
        } else {
            const std::size_t rows = net.config_count(v);
            for (std::size_t r = 0; r < rows; ++r) {
                // Decode the mixed-radix row index, last parent fastest.
                std::vector<std::size_t> digits(var.parents.size());
                std::size_t rest = r;
                for (std::size_t i = var.parents.size(); i-- > 0;) {
                    const std::size_t radix = net.variables[var.parents[i]].states.size();
                    digits[i] = rest % radix;
                    rest /= radix;
                }
                out << "  (";
                for (std::size_t i = 0; i < digits.size(); ++i)
                    out << (i ? ", " : "") << net.variables[var.parents[i]].states[digits[i]];
                out << ") ";
                for (std::size_t s = 0; s < k; ++s) out << (s ? ", " : "") << var.cpt[r * k + s];
                out << ";\n";
            }
        }
        out << "}\n";
    }
    return out.str();
}

Dataset forward_sample(const BayesNet& net, std::size_t n, Rng& rng) {
    const int count = net.size();
    std::vector<std::vector<int>> codes(count, std::vector<int>(n));
    const auto order = net.dag().topological_order();
    for (std::size_t row = 0; row < n; ++row) {
        for (NodeId v : order) {
            const auto& var = net.variables[v];
            std::size_t config = 0;
            for (NodeId p : var.parents)
                config = config * net.variables[p].states.size() + static_cast<std::size_t>(codes[p][row]);
            const std::size_t k = var.states.size();
            const double u = uniform01(rng);
            double acc = 0.0;
            int pick = static_cast<int>(k) - 1;
            for (std::size_t s = 0; s < k; ++s) {
                acc += var.cpt[config * k + s];
                if (u < acc) {
                    pick = static_cast<int>(s);
                    break;
                }
            }
            // Guard against trailing zero-probability states absorbing rounding slack.
            while (pick > 0 && var.cpt[config * k + pick] == 0.0) --pick;
            codes[v][row] = pick;
        }
    }
    std::vector<std::vector<std::string>> levels;
    for (const auto& var : net.variables) levels.push_back(var.states);
    return Dataset(net.names(), std::move(levels), std::move(codes));
}

BayesNet random_bayes_net(const Dag& g, int min_states, int max_states, double concentration, Rng& rng) {
    if (min_states < 2 || max_states < min_states) throw InputError("bad state-count range");
    BayesNet net;
    net.name = "random";
    std::uniform_int_distribution<int> states(min_states, max_states);
    std::gamma_distribution<double> gamma(concentration, 1.0);
    for (NodeId v = 0; v < g.node_count(); ++v) {
        Variable var;
        var.name = "X" + std::to_string(v);
        const int k = states(rng);
        for (int s = 0; s < k; ++s) var.states.push_back("s" + std::to_string(s));
        var.parents = g.parents(v);
        net.variables.push_back(std::move(var));
    }
    for (NodeId v = 0; v < g.node_count(); ++v) {
        auto& var = net.variables[v];
        const std::size_t k = var.states.size();
        const std::size_t rows = net.config_count(v);
        var.cpt.resize(rows * k);
        for (std::size_t r = 0; r < rows; ++r) {
            double sum = 0.0;
            for (std::size_t s = 0; s < k; ++s) sum += var.cpt[r * k + s] = gamma(rng) + 1e-12;
            for (std::size_t s = 0; s < k; ++s) var.cpt[r * k + s] /= sum;
        }
    }
    return net;
}

}  // namespace mosacd
