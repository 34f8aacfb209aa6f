#include "coldamp/netlist.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numeric>
#include <set>
#include <sstream>

namespace coldamp {

namespace {

std::string upper(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return std::toupper(c); });
    return out;
}

std::string trim(std::string_view s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    size_t e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

// Full precision so serialized decks reparse to bit-identical values.
std::string fmt9(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct Token {
    std::string text;
    int column;  // 1-based position in the logical line
};

struct Line {
    std::string text;
    int number;  // 1-based source line of the first physical line
};

std::vector<Token> tokenize(const std::string& text) {
    std::vector<Token> toks;
    size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        if (i >= text.size()) break;
        size_t start = i;
        while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        toks.push_back({text.substr(start, i - start), static_cast<int>(start) + 1});
    }
    return toks;
}

constexpr double kNoSuffix = 1.0;

// Longest suffix first; "meg" must win over "m".
double suffix_scale(std::string_view rest, size_t* consumed) {
    std::string r = upper(rest);
    if (r.rfind("MEG", 0) == 0) { *consumed = 3; return 1e6; }
    if (r.empty()) { *consumed = 0; return kNoSuffix; }
    switch (r[0]) {
        case 'F': *consumed = 1; return 1e-15;
        case 'P': *consumed = 1; return 1e-12;
        case 'N': *consumed = 1; return 1e-9;
        case 'U': *consumed = 1; return 1e-6;
        case 'M': *consumed = 1; return 1e-3;
        case 'K': *consumed = 1; return 1e3;
        case 'G': *consumed = 1; return 1e9;
        default: *consumed = 0; return kNoSuffix;
    }
}

}  // namespace

ParseError::ParseError(int line_, int column_, const std::string& reason)
    : std::runtime_error("line " + std::to_string(line_) + ", col " +
                         std::to_string(column_) + ": " + reason),
      line(line_),
      column(column_) {}

double parse_spice_number(std::string_view token) {
    std::string s(token);
    const char* begin = s.c_str();
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin || !std::isfinite(v))
        throw std::invalid_argument("not a number: '" + s + "'");
    size_t used = 0;
    double scale = suffix_scale(s.substr(end - begin), &used);
    // Trailing unit letters ("3.3pF", "1kOhm") are ignored, anything else is an error.
    for (const char* p = end + used; *p; ++p) {
        if (!std::isalpha(static_cast<unsigned char>(*p)))
            throw std::invalid_argument("trailing garbage in number: '" + s + "'");
    }
    return v * scale;
}

namespace {

double number_or_throw(const Token& tok, int line) {
    try {
        return parse_spice_number(tok.text);
    } catch (const std::invalid_argument& e) {
        throw ParseError(line, tok.column, e.what());
    }
}

class Parser {
public:
    explicit Parser(std::string_view text) { split_lines(text); }

    Netlist run() {
        for (const Line& line : lines_) parse_line(line);
        finish();
        return std::move(net_);
    }

private:
    void split_lines(std::string_view text) {
        std::vector<std::pair<std::string, int>> physical;
        std::string cur;
        int lineno = 1;
        for (char ch : text) {
            if (ch == '\n') {
                physical.emplace_back(cur, lineno);
                cur.clear();
                ++lineno;
            } else if (ch != '\r') {
                cur.push_back(ch);
            }
        }
        physical.emplace_back(cur, lineno);

        // Join '+' continuations, capture the first comment as the title,
        // drop blank and comment lines.
        bool saw_title = false;
        for (auto& [raw, num] : physical) {
            std::string t = trim(raw);
            if (t.empty()) continue;
            if (t[0] == '*') {
                if (!saw_title) {
                    net_.title = trim(t.substr(1));
                    saw_title = true;
                }
                continue;
            }
            if (t[0] == '+') {
                if (lines_.empty())
                    throw ParseError(num, 1, "continuation line with nothing to continue");
                lines_.back().text += " " + trim(t.substr(1));
                continue;
            }
            lines_.push_back({t, num});
        }
    }

    void parse_line(const Line& line) {
        if (ended_) return;
        std::vector<Token> toks = tokenize(line.text);
        if (toks.empty()) return;
        if (toks[0].text[0] == '.') {
            parse_directive(line, toks);
        } else {
            parse_element(line, toks);
        }
    }

    void require_args(const Line& line, const std::vector<Token>& toks, size_t n,
                      const char* what) {
        if (toks.size() < n + 1)
            throw ParseError(line.number, toks[0].column,
                             std::string(what) + ": expected " + std::to_string(n) +
                                 " arguments, got " + std::to_string(toks.size() - 1));
    }

    std::string node(const Token& tok) {
        auto it = std::find(net_.nodes.begin(), net_.nodes.end(), tok.text);
        if (it == net_.nodes.end()) net_.nodes.push_back(tok.text);
        return tok.text;
    }

    void check_unique(const Line& line, const Token& name) {
        std::string key = upper(name.text);
        if (!element_names_.insert(key).second)
            throw ParseError(line.number, name.column,
                             "duplicate element name '" + name.text + "'");
    }

    void parse_element(const Line& line, const std::vector<Token>& toks) {
        char kind_ch = static_cast<char>(std::toupper(static_cast<unsigned char>(toks[0].text[0])));
        Element el;
        el.name = toks[0].text;
        check_unique(line, toks[0]);
        switch (kind_ch) {
            case 'R': el.kind = ElementKind::Resistor; break;
            case 'C': el.kind = ElementKind::Capacitor; break;
            case 'L': el.kind = ElementKind::Inductor; break;
            case 'V': el.kind = ElementKind::VSource; break;
            case 'I': el.kind = ElementKind::ISource; break;
            case 'G': el.kind = ElementKind::Vccs; break;
            case 'J': el.kind = ElementKind::Fet; break;
            default:
                throw ParseError(line.number, toks[0].column,
                                 "unknown element kind '" + std::string(1, toks[0].text[0]) + "'");
        }
        switch (el.kind) {
            case ElementKind::Resistor:
            case ElementKind::Capacitor:
            case ElementKind::Inductor: {
                require_args(line, toks, 3, "passive element");
                el.nodes = {node(toks[1]), node(toks[2])};
                el.value = number_or_throw(toks[3], line.number);
                if (!(el.value > 0.0) || !std::isfinite(el.value))
                    throw ParseError(line.number, toks[3].column,
                                     "passive value must be positive and finite");
                break;
            }
            case ElementKind::VSource:
            case ElementKind::ISource: {
                require_args(line, toks, 3, "source");
                el.nodes = {node(toks[1]), node(toks[2])};
                el.value = number_or_throw(toks[3], line.number);
                if (toks.size() > 4) {
                    if (upper(toks[4].text) != "AC")
                        throw ParseError(line.number, toks[4].column,
                                         "expected 'AC <magnitude>'");
                    require_args(line, toks, 5, "source with AC");
                    el.ac_magnitude = number_or_throw(toks[5], line.number);
                }
                break;
            }
            case ElementKind::Vccs: {
                require_args(line, toks, 5, "VCCS");
                el.nodes = {node(toks[1]), node(toks[2]), node(toks[3]), node(toks[4])};
                el.value = number_or_throw(toks[5], line.number);
                break;
            }
            case ElementKind::Fet: {
                require_args(line, toks, 4, "FET");
                el.nodes = {node(toks[1]), node(toks[2]), node(toks[3])};
                el.model = toks[4].text;
                if (el.nodes[0] == el.nodes[1])
                    throw ParseError(line.number, toks[1].column,
                                     "FET drain and gate must be distinct nodes");
                fet_lines_[upper(el.name)] = line.number;
                break;
            }
        }
        net_.elements.push_back(std::move(el));
    }

    void parse_directive(const Line& line, const std::vector<Token>& toks) {
        std::string kind = upper(toks[0].text);
        if (kind == ".END") {
            ended_ = true;
        } else if (kind == ".OP") {
            AnalysisDirective d;
            d.kind = AnalysisDirective::Kind::Op;
            net_.analyses.push_back(d);
        } else if (kind == ".DC") {
            require_args(line, toks, 4, ".dc");
            AnalysisDirective d;
            d.kind = AnalysisDirective::Kind::DcSweep;
            d.source = toks[1].text;
            d.start = number_or_throw(toks[2], line.number);
            d.stop = number_or_throw(toks[3], line.number);
            d.step = number_or_throw(toks[4], line.number);
            if (!(d.step > 0.0))
                throw ParseError(line.number, toks[4].column, ".dc step must be > 0");
            if (d.start > d.stop)
                throw ParseError(line.number, toks[2].column, ".dc start must not exceed stop");
            net_.analyses.push_back(d);
        } else if (kind == ".AC") {
            require_args(line, toks, 4, ".ac");
            if (upper(toks[1].text) != "DEC")
                throw ParseError(line.number, toks[1].column, "only '.ac dec' sweeps are supported");
            AnalysisDirective d;
            d.kind = AnalysisDirective::Kind::AcSweep;
            double ppd = number_or_throw(toks[2], line.number);
            d.points_per_decade = static_cast<int>(ppd);
            if (d.points_per_decade < 1 || ppd != d.points_per_decade)
                throw ParseError(line.number, toks[2].column, "points per decade must be a positive integer");
            d.f_start = number_or_throw(toks[3], line.number);
            d.f_stop = number_or_throw(toks[4], line.number);
            if (!(d.f_start > 0.0))
                throw ParseError(line.number, toks[3].column, "f_start must be > 0");
            if (!(d.f_start < d.f_stop))
                throw ParseError(line.number, toks[3].column, "f_start must be < f_stop");
            net_.analyses.push_back(d);
        } else if (kind == ".PROBE") {
            require_args(line, toks, 1, ".probe");
            for (size_t i = 1; i < toks.size(); ++i)
                net_.probes.push_back(parse_probe_ref(line, toks[i]));
        } else if (kind == ".MODEL") {
            parse_model(line, toks);
        } else {
            throw ParseError(line.number, toks[0].column,
                             "unknown directive '" + toks[0].text + "'");
        }
    }

    ProbeRef parse_probe_ref(const Line& line, const Token& tok) {
        std::string t = tok.text;
        auto open = t.find('(');
        if (open == std::string::npos || t.back() != ')' || open == 0)
            throw ParseError(line.number, tok.column,
                             "probe must look like V(node), I(elem) or P(elem)");
        std::string q = upper(t.substr(0, open));
        std::string target = trim(t.substr(open + 1, t.size() - open - 2));
        if (target.empty())
            throw ParseError(line.number, tok.column, "empty probe target");
        ProbeRef ref;
        if (q == "V") ref.quantity = ProbeQuantity::V;
        else if (q == "I") ref.quantity = ProbeQuantity::I;
        else if (q == "P") ref.quantity = ProbeQuantity::P;
        else
            throw ParseError(line.number, tok.column, "probe quantity must be V, I or P");
        ref.target = target;
        return ref;
    }

    void parse_model(const Line& line, const std::vector<Token>& toks) {
        require_args(line, toks, 2, ".model");
        std::string name = upper(toks[1].text);
        if (net_.models.count(name))
            throw ParseError(line.number, toks[1].column, "duplicate model '" + toks[1].text + "'");
        if (upper(toks[2].text) != "STATZ")
            throw ParseError(line.number, toks[2].column, "only STATZ models are supported");
        StatzParams p;
        std::set<std::string> seen;
        for (size_t i = 3; i < toks.size(); ++i) {
            const std::string& t = toks[i].text;
            auto eq = t.find('=');
            if (eq == std::string::npos || eq == 0 || eq == t.size() - 1)
                throw ParseError(line.number, toks[i].column, "expected key=value, got '" + t + "'");
            std::string key = upper(t.substr(0, eq));
            double v = 0;
            try {
                v = parse_spice_number(t.substr(eq + 1));
            } catch (const std::invalid_argument& e) {
                throw ParseError(line.number, toks[i].column, e.what());
            }
            seen.insert(key);
            if (key == "BETA") p.beta = v;
            else if (key == "VTO") p.u_t = v;
            else if (key == "LAMBDA") p.lambda = v;
            else if (key == "ALPHA") p.alpha = v;
            else if (key == "CIN") p.c_in = v;
            else if (key == "RIN") p.r_in = v;
            else
                throw ParseError(line.number, toks[i].column, "unknown model key '" + key + "'");
        }
        for (const char* req : {"BETA", "VTO", "CIN", "RIN"})
            if (!seen.count(req))
                throw ParseError(line.number, toks[0].column,
                                 "model missing required key '" + std::string(req) + "'");
        if (!(p.beta > 0.0))
            throw ParseError(line.number, toks[0].column, "model beta must be > 0");
        if (!(p.alpha > 0.0))
            throw ParseError(line.number, toks[0].column, "model alpha must be > 0");
        if (p.lambda < 0.0 || p.c_in < 0.0 || p.r_in < 0.0)
            throw ParseError(line.number, toks[0].column,
                             "model lambda/cin/rin must be non-negative");
        net_.models.emplace(name, p);
    }

    void finish() {
        // Ground must exist and be referenced by an element.
        bool ground_ref = false;
        for (const Element& el : net_.elements)
            for (const std::string& n : el.nodes)
                if (n == "0") ground_ref = true;
        if (!ground_ref)
            throw ParseError(1, 1, "no element references ground node 0");

        for (const Element& el : net_.elements) {
            if (el.kind != ElementKind::Fet) continue;
            if (!net_.models.count(upper(el.model)))
                throw ParseError(fet_lines_.at(upper(el.name)), 1,
                                 "FET '" + el.name + "' references undeclared model '" +
                                     el.model + "'");
        }

        for (const AnalysisDirective& d : net_.analyses) {
            if (d.kind != AnalysisDirective::Kind::DcSweep) continue;
            const Element* src = net_.find_element(d.source);
            if (!src || src->kind != ElementKind::VSource)
                throw ParseError(1, 1, ".dc names unknown voltage source '" + d.source + "'");
        }
        for (const ProbeRef& p : net_.probes) {
            if (p.quantity == ProbeQuantity::V) {
                if (!net_.has_node(p.target))
                    throw ParseError(1, 1, "probe references undeclared node '" + p.target + "'");
            } else if (!net_.find_element(p.target)) {
                throw ParseError(1, 1, "probe references undeclared element '" + p.target + "'");
            }
        }
        // Probes designate ports for every analysis that wants them.
        for (AnalysisDirective& d : net_.analyses) d.probes = net_.probes;
    }

    Netlist net_;
    std::vector<Line> lines_;
    std::set<std::string> element_names_;
    std::map<std::string, int> fet_lines_;
    bool ended_ = false;
};

}  // namespace

const Element* Netlist::find_element(std::string_view name) const {
    std::string key = upper(name);
    for (const Element& el : elements)
        if (upper(el.name) == key) return &el;
    return nullptr;
}

const StatzParams& Netlist::model_for(const Element& fet) const {
    return models.at(upper(fet.model));
}

bool Netlist::has_node(std::string_view node) const {
    return std::find(nodes.begin(), nodes.end(), node) != nodes.end();
}

Netlist parse(std::string_view source_text) {
    return Parser(source_text).run();
}

namespace {

class UnionFind {
public:
    int find(const std::string& key) {
        auto [it, inserted] = index_.try_emplace(key, static_cast<int>(parent_.size()));
        if (inserted) parent_.push_back(it->second);
        int i = it->second;
        while (parent_[i] != i) i = parent_[i] = parent_[parent_[i]];
        return i;
    }
    // Returns false when the nodes were already connected.
    bool unite(const std::string& a, const std::string& b) {
        int ra = find(a), rb = find(b);
        if (ra == rb) return false;
        parent_[ra] = rb;
        return true;
    }

private:
    std::map<std::string, int> index_;
    std::vector<int> parent_;
};

}  // namespace

std::vector<std::string> validate(const Netlist& netlist) {
    std::vector<std::string> diags;

    // DC conduction graph: R, L, V and the FET channel. C and I are open.
    UnionFind dc_path;
    dc_path.find("0");
    for (const Element& el : netlist.elements) {
        switch (el.kind) {
            case ElementKind::Resistor:
            case ElementKind::Inductor:
            case ElementKind::VSource:
                dc_path.unite(el.nodes[0], el.nodes[1]);
                break;
            case ElementKind::Fet:
                dc_path.unite(el.nodes[0], el.nodes[2]);  // drain-source channel
                break;
            default:
                break;
        }
    }
    std::vector<std::string> floating;
    for (const std::string& n : netlist.nodes) {
        if (n == "0") continue;
        if (dc_path.find(n) != dc_path.find("0")) {
            floating.push_back(n);
            diags.push_back("floating node '" + n + "': no DC path to ground");
        }
    }

    // Loops of ideal voltage sources (inductors are shorts at DC).
    UnionFind vloop;
    for (const Element& el : netlist.elements) {
        if (el.kind != ElementKind::VSource && el.kind != ElementKind::Inductor) continue;
        if (!vloop.unite(el.nodes[0], el.nodes[1]))
            diags.push_back("source loop: '" + el.name +
                            "' closes a loop of ideal voltage sources/inductors between nodes '" +
                            el.nodes[0] + "' and '" + el.nodes[1] + "'");
    }

    // Current sources driving a floating island form a cutset: the island
    // has no DC return, so any net injection is inconsistent.
    for (const std::string& n : floating) {
        double net_in = 0.0;
        std::vector<std::string> srcs;
        for (const Element& el : netlist.elements) {
            if (el.kind != ElementKind::ISource) continue;
            bool into = dc_path.find(el.nodes[1]) == dc_path.find(n);
            bool outof = dc_path.find(el.nodes[0]) == dc_path.find(n);
            if (into == outof) continue;  // both ends inside or outside the island
            net_in += into ? el.value : -el.value;
            srcs.push_back(el.name);
        }
        if (!srcs.empty() && net_in != 0.0) {
            std::string msg = "current source cutset into floating island at '" + n + "':";
            for (const std::string& s : srcs) msg += " '" + s + "'";
            diags.push_back(msg);
            break;  // one island diagnostic is enough
        }
    }
    return diags;
}

std::string serialize(const Netlist& netlist) {
    std::ostringstream out;
    out << "* " << netlist.title << "\n";
    for (const Element& el : netlist.elements) {
        out << el.name;
        for (const std::string& n : el.nodes) out << " " << n;
        if (el.kind == ElementKind::Fet) {
            out << " " << el.model;
        } else {
            out << " " << fmt9(el.value);
            if (el.ac_magnitude) out << " AC " << fmt9(*el.ac_magnitude);
        }
        out << "\n";
    }
    for (const auto& [name, p] : netlist.models) {
        out << ".model " << name << " STATZ beta=" << fmt9(p.beta) << " vto=" << fmt9(p.u_t)
            << " lambda=" << fmt9(p.lambda) << " alpha=" << fmt9(p.alpha)
            << " cin=" << fmt9(p.c_in) << " rin=" << fmt9(p.r_in) << "\n";
    }
    for (const AnalysisDirective& d : netlist.analyses) {
        switch (d.kind) {
            case AnalysisDirective::Kind::Op:
                out << ".op\n";
                break;
            case AnalysisDirective::Kind::DcSweep:
                out << ".dc " << d.source << " " << fmt9(d.start) << " " << fmt9(d.stop) << " "
                    << fmt9(d.step) << "\n";
                break;
            case AnalysisDirective::Kind::AcSweep:
                out << ".ac dec " << d.points_per_decade << " " << fmt9(d.f_start) << " "
                    << fmt9(d.f_stop) << "\n";
                break;
        }
    }
    if (!netlist.probes.empty()) {
        out << ".probe";
        for (const ProbeRef& p : netlist.probes) {
            const char* q = p.quantity == ProbeQuantity::V   ? "V"
                            : p.quantity == ProbeQuantity::I ? "I"
                                                             : "P";
            out << " " << q << "(" << p.target << ")";
        }
        out << "\n";
    }
    out << ".end\n";
    return out.str();
}

bool structurally_equal(const Netlist& a, const Netlist& b) {
    auto same_opt = [](const std::optional<double>& x, const std::optional<double>& y) {
        return x.has_value() == y.has_value() && (!x || *x == *y);
    };
    if (a.elements.size() != b.elements.size()) return false;
    for (size_t i = 0; i < a.elements.size(); ++i) {
        const Element& ea = a.elements[i];
        const Element& eb = b.elements[i];
        if (upper(ea.name) != upper(eb.name) || ea.kind != eb.kind || ea.nodes != eb.nodes ||
            ea.value != eb.value || !same_opt(ea.ac_magnitude, eb.ac_magnitude) ||
            upper(ea.model) != upper(eb.model))
            return false;
    }
    if (a.models.size() != b.models.size()) return false;
    for (const auto& [name, pa] : a.models) {
        auto it = b.models.find(name);
        if (it == b.models.end()) return false;
        const StatzParams& pb = it->second;
        if (pa.beta != pb.beta || pa.u_t != pb.u_t || pa.lambda != pb.lambda ||
            pa.alpha != pb.alpha || pa.c_in != pb.c_in || pa.r_in != pb.r_in)
            return false;
    }
    if (a.analyses.size() != b.analyses.size()) return false;
    for (size_t i = 0; i < a.analyses.size(); ++i) {
        const AnalysisDirective& da = a.analyses[i];
        const AnalysisDirective& db = b.analyses[i];
        if (da.kind != db.kind || upper(da.source) != upper(db.source) || da.start != db.start ||
            da.stop != db.stop || da.step != db.step ||
            da.points_per_decade != db.points_per_decade || da.f_start != db.f_start ||
            da.f_stop != db.f_stop)
            return false;
    }
    if (a.probes.size() != b.probes.size()) return false;
    for (size_t i = 0; i < a.probes.size(); ++i)
        if (a.probes[i].quantity != b.probes[i].quantity ||
            upper(a.probes[i].target) != upper(b.probes[i].target))
            return false;
    return true;
}

}  // namespace coldamp
