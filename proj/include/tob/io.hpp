#ifndef TOB_IO_HPP
#define TOB_IO_HPP

// JSON input schemas and serializers.
//
// Extension:
//   { "space":      { "points": [labels], "weights": [numbers] },
//     "generators": [[images], ...],
//     "factor":     { "base_space": { "points": [...], "weights": [...] },
//                     "map": [base label or index per point],
//                     "base_generators": [[images], ...] } }
// Finite set:
//   { "space": { "points": [labels], "dims": [positive integers] },
//     "M": [vector, ...], "F": [vector, ...] (optional), "radius": number (optional) }
//   vector = one array per point, entries a number or [re, im]
// Sequence model:
//   { "n": integer >= 2, "delta": [numbers] (optional) }
//
// Schema violations throw SchemaError carrying the line of the offending value.

#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "tob/errors.hpp"
#include "tob/lns.hpp"
#include "tob/mixing.hpp"
#include "tob/mps.hpp"
#include "tob/stone.hpp"

namespace tob::io {

using json = nlohmann::ordered_json;

class SchemaError : public Error {
public:
    SchemaError(const std::string& source, std::size_t line, const std::string& pointer, const std::string& what)
        : Error(source + ":" + std::to_string(line) + ": " + (pointer.empty() ? "/" : pointer) + ": " + what),
          line_(line),
          pointer_(pointer) {}
    std::size_t line() const noexcept { return line_; }
    const std::string& pointer() const noexcept { return pointer_; }

private:
    std::size_t line_;
    std::string pointer_;
};

namespace detail {

inline std::string escape_pointer_token(const std::string& key) {
    std::string out;
    for (char c : key) {
        if (c == '~')
            out += "~0";
        else if (c == '/')
            out += "~1";
        else
            out += c;
    }
    return out;
}

// Records the starting line of every value, keyed by JSON pointer.  Runs on
// text that the JSON parser has already accepted.
class LineScanner {
public:
    explicit LineScanner(std::string_view text) : text_(text) {}

    std::map<std::string, std::size_t> run() {
        skip_ws();
        value("");
        return std::move(lines_);
    }

private:
    void skip_ws() {
        while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n' || text_[pos_] == '\r')) {
            if (text_[pos_] == '\n') ++line_;
            ++pos_;
        }
    }

    std::string string() {
        std::string out;
        ++pos_;  // opening quote
        while (pos_ < text_.size() && text_[pos_] != '"') {
            if (text_[pos_] == '\\' && pos_ + 1 < text_.size()) {
                const char e = text_[pos_ + 1];
                out += (e == 'n') ? '\n' : (e == 't') ? '\t' : (e == 'u') ? '?' : e;
                pos_ += (e == 'u') ? 6 : 2;
            } else {
                out += text_[pos_++];
            }
        }
        ++pos_;  // closing quote
        return out;
    }

    void value(const std::string& ptr) {
        lines_[ptr] = line_;
        if (pos_ >= text_.size()) return;
        const char c = text_[pos_];
        if (c == '{') {
            ++pos_;
            skip_ws();
            while (pos_ < text_.size() && text_[pos_] != '}') {
                const std::string key = string();
                skip_ws();
                ++pos_;  // ':'
                skip_ws();
                value(ptr + "/" + escape_pointer_token(key));
                skip_ws();
                if (pos_ < text_.size() && text_[pos_] == ',') ++pos_;
                skip_ws();
            }
            ++pos_;
        } else if (c == '[') {
            ++pos_;
            skip_ws();
            std::size_t i = 0;
            while (pos_ < text_.size() && text_[pos_] != ']') {
                value(ptr + "/" + std::to_string(i++));
                skip_ws();
                if (pos_ < text_.size() && text_[pos_] == ',') ++pos_;
                skip_ws();
            }
            ++pos_;
        } else if (c == '"') {
            string();
        } else {
            while (pos_ < text_.size() && std::string_view(",]} \t\r\n").find(text_[pos_]) == std::string_view::npos) ++pos_;
        }
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::map<std::string, std::size_t> lines_;
};

}  // namespace detail

class Document {
public:
    Document(const std::string& text, std::string source) : source_(std::move(source)) {
        try {
            root_ = json::parse(text);
        } catch (const json::parse_error& e) {
            std::size_t line = 1;
            for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) line += text[i] == '\n';
            std::string msg = e.what();
            if (auto p = msg.find("syntax error"); p != std::string::npos) msg = msg.substr(p);
            throw SchemaError(source_, line, "", msg);
        }
        lines_ = detail::LineScanner(text).run();
    }

    const json& root() const noexcept { return root_; }
    const std::string& source() const noexcept { return source_; }

    std::size_t line(std::string pointer) const {
        for (;;) {
            if (auto it = lines_.find(pointer); it != lines_.end()) return it->second;
            const auto cut = pointer.rfind('/');
            if (cut == std::string::npos) return 1;
            pointer.resize(cut);
        }
    }

    [[noreturn]] void fail(const std::string& pointer, const std::string& what) const {
        throw SchemaError(source_, line(pointer), pointer, what);
    }

private:
    std::string source_;
    json root_;
    std::map<std::string, std::size_t> lines_;
};

// A value inside a document together with its JSON pointer.
class Node {
public:
    Node(const Document& doc, const json& value, std::string pointer)
        : doc_(&doc), value_(&value), pointer_(std::move(pointer)) {}
    explicit Node(const Document& doc) : Node(doc, doc.root(), "") {}

    const json& value() const noexcept { return *value_; }
    const std::string& pointer() const noexcept { return pointer_; }
    [[noreturn]] void fail(const std::string& what) const { doc_->fail(pointer_, what); }

    const Node& object(std::initializer_list<const char*> allowed) const {
        if (!value_->is_object()) fail("expected an object");
        for (const auto& [key, v] : value_->items()) {
            bool known = false;
            for (const char* a : allowed) known = known || key == a;
            if (!known) Node(*doc_, v, pointer_ + "/" + detail::escape_pointer_token(key)).fail("unknown key '" + key + "'");
        }
        return *this;
    }

    std::optional<Node> find(const std::string& key) const {
        auto it = value_->find(key);
        if (it == value_->end()) return std::nullopt;
        return Node(*doc_, *it, pointer_ + "/" + detail::escape_pointer_token(key));
    }

    Node at(const std::string& key) const {
        if (auto n = find(key)) return *n;
        fail("missing required key '" + key + "'");
    }

    std::vector<Node> array(std::size_t min_size = 0) const {
        if (!value_->is_array()) fail("expected an array");
        if (value_->size() < min_size) fail("expected at least " + std::to_string(min_size) + " entries");
        std::vector<Node> out;
        for (std::size_t i = 0; i < value_->size(); ++i)
            out.emplace_back(*doc_, (*value_)[i], pointer_ + "/" + std::to_string(i));
        return out;
    }

    double number() const {
        if (!value_->is_number()) fail("expected a number");
        const double v = value_->get<double>();
        if (!std::isfinite(v)) fail("expected a finite number");
        return v;
    }

    std::size_t index() const {
        if (!value_->is_number_integer() || value_->get<long long>() < 0) fail("expected a non-negative integer");
        return value_->get<std::size_t>();
    }

    std::string string() const {
        if (!value_->is_string()) fail("expected a string");
        return value_->get<std::string>();
    }

    Complex complex() const {
        if (value_->is_number()) return number();
        const auto parts = array();
        if (parts.size() != 2) fail("expected a number or a pair [re, im]");
        return {parts[0].number(), parts[1].number()};
    }

private:
    const Document* doc_;
    const json* value_;
    std::string pointer_;
};

// ---------------------------------------------------------------------------
// Readers
// ---------------------------------------------------------------------------

inline PointSet read_points(const Node& node) {
    std::vector<std::string> labels;
    std::set<std::string> seen;
    for (const auto& p : node.array(1)) {
        auto label = p.string();
        if (!seen.insert(label).second) p.fail("duplicate point label '" + label + "'");
        labels.push_back(std::move(label));
    }
    return PointSet(std::move(labels));
}

inline FiniteProbabilitySpace read_probability_space(const Node& node, double tol = default_tol) {
    node.object({"points", "weights"});
    const auto points = read_points(node.at("points"));
    const auto wnode = node.at("weights");
    const auto entries = wnode.array();
    if (entries.size() != points.size())
        wnode.fail(std::to_string(entries.size()) + " weights for " + std::to_string(points.size()) + " points");
    std::vector<double> weights;
    double sum = 0.0;
    for (const auto& e : entries) {
        const double w = e.number();
        if (!(w > 0.0)) e.fail("weight must be positive");
        weights.push_back(w);
        sum += w;
    }
    if (std::abs(sum - 1.0) > tol) wnode.fail("weights sum to " + std::to_string(sum) + ", not 1");
    return FiniteProbabilitySpace(points, std::move(weights), tol);
}

inline Permutation read_permutation(const Node& node, std::size_t n) {
    const auto entries = node.array();
    if (entries.size() != n)
        node.fail("permutation has " + std::to_string(entries.size()) + " entries, expected " + std::to_string(n));
    std::vector<std::size_t> image;
    std::vector<bool> hit(n, false);
    for (const auto& e : entries) {
        const auto v = e.index();
        if (v >= n) e.fail("image " + std::to_string(v) + " out of range");
        if (hit[v]) e.fail("image " + std::to_string(v) + " repeated; not a bijection");
        hit[v] = true;
        image.push_back(v);
    }
    return Permutation(std::move(image));
}

inline std::vector<Permutation> read_generators(const Node& node, std::size_t n) {
    std::vector<Permutation> gens;
    for (const auto& g : node.array(1)) gens.push_back(read_permutation(g, n));
    return gens;
}

// Structural schema only; measure preservation and equivariance are checked
// separately by validate_extension.
inline ExtensionData read_extension(const Document& doc, double tol = default_tol) {
    const Node root(doc);
    root.object({"space", "generators", "factor"});
    auto X = read_probability_space(root.at("space"), tol);
    auto gens = read_generators(root.at("generators"), X.size());
    const auto factor = root.at("factor");
    factor.object({"base_space", "map", "base_generators"});
    auto Y = read_probability_space(factor.at("base_space"), tol);
    const auto base_node = factor.at("base_generators");
    auto base = read_generators(base_node, Y.size());
    if (base.size() != gens.size())
        base_node.fail(std::to_string(base.size()) + " base generators for " + std::to_string(gens.size()) +
                       " generators");
    const auto map_node = factor.at("map");
    const auto entries = map_node.array();
    if (entries.size() != X.size())
        map_node.fail("factor map has " + std::to_string(entries.size()) + " entries for " + std::to_string(X.size()) +
                      " points");
    std::vector<std::size_t> map;
    for (const auto& e : entries) {
        if (e.value().is_string()) {
            const auto idx = Y.points().index_of(e.string());
            if (!idx) e.fail("unknown base point '" + e.string() + "'");
            map.push_back(*idx);
        } else {
            const auto v = e.index();
            if (v >= Y.size()) e.fail("base point index " + std::to_string(v) + " out of range");
            map.push_back(v);
        }
    }
    return ExtensionData{std::move(X), std::move(gens), std::move(Y), std::move(base), std::move(map)};
}

struct SetInput {
    PointSet points{std::vector<std::string>{"0"}};
    FiberSpace space;
    FiniteSet M;
    std::optional<FiniteSet> F;
    std::optional<double> radius;
};

inline ModuleVector read_vector(const Node& node, const FiberSpace& space) {
    const auto fibers = node.array();
    if (fibers.size() != space.points())
        node.fail("vector has " + std::to_string(fibers.size()) + " fibers, expected " + std::to_string(space.points()));
    auto x = ModuleVector::zero(space);
    for (std::size_t w = 0; w < fibers.size(); ++w) {
        const auto entries = fibers[w].array();
        if (entries.size() != space.dim(w))
            fibers[w].fail("fiber has " + std::to_string(entries.size()) + " entries, expected dimension " +
                           std::to_string(space.dim(w)));
        for (std::size_t j = 0; j < entries.size(); ++j)
            x.fiber(w)(static_cast<Eigen::Index>(j)) = entries[j].complex();
    }
    return x;
}

inline FiniteSet read_set(const Node& node, const FiberSpace& space, std::size_t min_size) {
    FiniteSet out(space);
    for (const auto& v : node.array(min_size)) out.push_back(read_vector(v, space));
    return out;
}

inline SetInput read_set_input(const Document& doc) {
    const Node root(doc);
    root.object({"space", "M", "F", "radius"});
    const auto s = root.at("space");
    s.object({"points", "dims"});
    SetInput in;
    in.points = read_points(s.at("points"));
    const auto dnode = s.at("dims");
    std::vector<std::size_t> dims;
    for (const auto& d : dnode.array()) {
        const auto v = d.index();
        if (v == 0) d.fail("fiber dimension must be positive");
        dims.push_back(v);
    }
    if (dims.size() != in.points.size())
        dnode.fail(std::to_string(dims.size()) + " dimensions for " + std::to_string(in.points.size()) + " points");
    in.space = FiberSpace(std::move(dims));
    in.M = read_set(root.at("M"), in.space, 1);
    if (auto f = root.find("F")) in.F = read_set(*f, in.space, 1);
    if (auto r = root.find("radius")) {
        const double v = r->number();
        if (!(v > 0)) r->fail("radius must be positive");
        in.radius = v;
    }
    return in;
}

struct SeqInput {
    std::size_t n = 0;
    std::vector<double> delta;
};

inline SeqInput read_seq_input(const Document& doc) {
    const Node root(doc);
    root.object({"n", "delta"});
    SeqInput in;
    const auto n = root.at("n");
    in.n = n.index();
    if (in.n < 2) n.fail("n must be at least 2");
    if (auto d = root.find("delta"))
        for (const auto& e : d->array(1)) {
            const double v = e.number();
            if (!(v > 0)) e.fail("delta must be positive");
            in.delta.push_back(v);
        }
    return in;
}

// ---------------------------------------------------------------------------
// Writers
// ---------------------------------------------------------------------------

inline json to_json(const StoneElement& a) {
    json out = json::array();
    for (double v : a.values()) out.push_back(v);
    return out;
}

inline json to_json(const PointSet& p) { return json(p.labels()); }

inline json to_json(Complex z) {
    if (z.imag() == 0.0) return z.real();
    return json::array({z.real(), z.imag()});
}

inline json to_json(const ModuleVector& x) {
    json out = json::array();
    for (std::size_t w = 0; w < x.points(); ++w) {
        json fiber = json::array();
        for (Eigen::Index j = 0; j < x.fiber(w).size(); ++j) fiber.push_back(to_json(x.fiber(w)(j)));
        out.push_back(std::move(fiber));
    }
    return out;
}

inline json to_json(const FiniteSet& F) {
    json out = json::array();
    for (const auto& x : F) out.push_back(to_json(x));
    return out;
}

inline json to_json(const FiniteProbabilitySpace& X) {
    return json{{"points", to_json(X.points())}, {"weights", X.weights()}};
}

inline json to_json(const std::vector<Permutation>& gens) {
    json out = json::array();
    for (const auto& g : gens) out.push_back(g.image());
    return out;
}

inline json to_json(const ExtensionData& e) {
    return json{{"space", to_json(e.upstairs)},
                {"generators", to_json(e.upstairs_generators)},
                {"factor",
                 {{"base_space", to_json(e.downstairs)},
                  {"map", e.factor},
                  {"base_generators", to_json(e.downstairs_generators)}}}};
}

inline json to_json(const SetInput& in) {
    json out{{"space", {{"points", to_json(in.points)}, {"dims", in.space.dims()}}}, {"M", to_json(in.M)}};
    if (in.F) out["F"] = to_json(*in.F);
    if (in.radius) out["radius"] = *in.radius;
    return out;
}

// Parts list the labels of the points in their idempotent.
inline json to_json(const CyclicWitness& w, const PointSet& points) {
    json parts = json::array();
    for (const auto& p : w.parts) {
        json support = json::array();
        for (std::size_t i = 0; i < p.q.size(); ++i)
            if (p.q[i]) support.push_back(points.label(i));
        parts.push_back({{"cardinality", p.cardinality}, {"support", support}, {"generators", to_json(p.generators)}});
    }
    return json{{"eps", w.eps}, {"parts", parts}};
}

}  // namespace tob::io

#endif  // TOB_IO_HPP
