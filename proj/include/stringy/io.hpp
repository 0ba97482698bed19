#pragma once

// JSON documents for graphs, orbifold data, toric pairs and q-series.
// Rationals are fraction strings; schema violations name the JSON path.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "stringy/dualgraph.hpp"
#include "stringy/elliptic.hpp"
#include "stringy/error.hpp"
#include "stringy/exact/ratexpr.hpp"
#include "stringy/orbifold.hpp"
#include "stringy/stringy.hpp"
#include "stringy/toric.hpp"

namespace stringy::io {

using json = nlohmann::ordered_json;
using exact::QLaurent;
using exact::Rational;
using exact::RatExpr;

/// A JSON value with its path from the document root.
class Node {
public:
    Node(const json& j, std::string path) : j_(&j), path_(std::move(path)) {}

    const json& raw() const { return *j_; }
    const std::string& path() const { return path_; }
    std::string where() const { return path_.empty() ? "/" : path_; }

    [[noreturn]] void error(const std::string& what) const { fail(ErrorKind::SchemaError, "at " + where() + ": " + what); }

    bool has(const std::string& key) const { return j_->is_object() && j_->contains(key); }
    Node operator[](const std::string& key) const {
        object();
        if (!j_->contains(key)) error("missing field '" + key + "'");
        return {j_->at(key), path_ + "/" + key};
    }
    Node operator[](std::size_t i) const { return {j_->at(i), path_ + "/" + std::to_string(i)}; }

    void object() const {
        if (!j_->is_object()) error("expected an object");
    }
    /// Rejects unknown keys.
    void only(std::initializer_list<const char*> keys) const {
        object();
        for (const auto& [k, v] : j_->items()) {
            bool known = false;
            for (const char* x : keys) known = known || k == x;
            if (!known) Node(v, path_ + "/" + k).error("unknown field");
        }
    }
    std::size_t array(std::optional<std::size_t> exact_size = {}) const {
        if (!j_->is_array()) error("expected an array");
        if (exact_size && j_->size() != *exact_size) error("expected " + std::to_string(*exact_size) + " entries");
        return j_->size();
    }
    std::vector<std::string> keys() const {
        object();
        std::vector<std::string> r;
        for (const auto& [k, v] : j_->items()) r.push_back(k);
        return r;
    }

    std::string str() const {
        if (!j_->is_string()) error("expected a string");
        return j_->get<std::string>();
    }
    bool boolean() const {
        if (!j_->is_boolean()) error("expected true or false");
        return j_->get<bool>();
    }
    std::int64_t integer() const {
        if (!j_->is_number_integer()) error("expected an integer");
        return j_->get<std::int64_t>();
    }
    Rational rational() const {
        if (j_->is_number_integer()) return Rational(static_cast<long>(j_->get<std::int64_t>()));
        if (!j_->is_string()) error("expected a fraction string");
        try {
            return Rational::parse(j_->get<std::string>());
        } catch (const Error& e) {
            error(e.what());
        }
    }
    RatExpr expr() const {
        try {
            return exact::parse_ratexpr(str());
        } catch (const Error& e) {
            error(e.what());
        }
    }
    QLaurent laurent() const {
        RatExpr r = expr();
        if (!r.den().is_constant()) error("expected a Laurent polynomial");
        return r.num() * QLaurent(Rational(1) / r.den().constant_value());
    }

private:
    const json* j_;
    std::string path_;
};

inline json parse_text(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        fail(ErrorKind::ParseError, e.what());
    }
}

inline std::string rat(const Rational& r) { return r.str(); }

// ---- resolution graphs ----

inline dualgraph::ResolutionGraph read_graph(const Node& n) {
    using dualgraph::CurveRecord;
    using dualgraph::Role;
    dualgraph::ResolutionGraph g;
    Node curves = n["curves"];
    for (std::size_t i = 0, k = curves.array(); i < k; ++i) {
        Node c = curves[i];
        c.only({"id", "role", "genus", "self_int", "coeff", "fiber", "e_poly"});
        CurveRecord r;
        r.id = c["id"].str();
        if (c.has("role")) {
            std::string role = c["role"].str();
            if (role == "strict") r.role = Role::StrictTransform;
            else if (role != "exceptional") c["role"].error("expected \"exceptional\" or \"strict\"");
        }
        if (c.has("genus")) r.genus = c["genus"].integer();
        if (r.exceptional()) {
            r.self_int = c["self_int"].integer();
            if (c.has("e_poly")) c["e_poly"].error("only strict transforms carry an E-polynomial");
        } else {
            if (c.has("self_int")) c["self_int"].error("strict transforms have no self-intersection");
            if (c.has("e_poly")) r.e_poly = c["e_poly"].expr();
        }
        if (c.has("coeff")) r.coeff = c["coeff"].rational();
        if (c.has("fiber")) r.fiber = c["fiber"].boolean();
        g.curves.push_back(std::move(r));
    }
    if (n.has("nodes")) {
        Node nodes = n["nodes"];
        for (std::size_t i = 0, k = nodes.array(); i < k; ++i) {
            Node e = nodes[i];
            e.array(2);
            g.nodes.emplace_back(e[0].str(), e[1].str());
        }
    }
    try {
        g.validate();
    } catch (const Error& e) {
        n.error(e.what());
    }
    return g;
}

inline json write_graph(const dualgraph::ResolutionGraph& g) {
    json curves = json::array();
    for (const auto& c : g.curves) {
        json r;
        r["id"] = c.id;
        if (c.exceptional()) {
            r["genus"] = c.genus;
            r["self_int"] = c.self_int;
        } else {
            r["role"] = "strict";
            r["genus"] = c.genus;
            r["e_poly"] = c.e_poly.str();
        }
        if (c.coeff) r["coeff"] = rat(*c.coeff);
        if (!c.fiber) r["fiber"] = false;
        curves.push_back(r);
    }
    json nodes = json::array();
    for (const auto& [a, b] : g.nodes) nodes.push_back(json::array({a, b}));
    json out;
    out["curves"] = curves;
    out["nodes"] = nodes;
    return out;
}

inline efn::Perturbation read_perturbation(const Node& n) {
    efn::Perturbation b;
    for (const auto& k : n.keys()) b[k] = n[k].rational();
    return b;
}

inline json write_perturbation(const efn::Perturbation& b) {
    json out = json::object();
    for (const auto& [k, v] : b) out[k] = rat(v);
    return out;
}

inline dualgraph::Site read_site(const Node& n) {
    std::string kind = n["kind"].str();
    if (kind == "free-point") {
        n.only({"kind"});
        return dualgraph::Site::free_point();
    }
    if (kind == "point-on") {
        n.only({"kind", "curve"});
        return dualgraph::Site::point_on(n["curve"].str());
    }
    if (kind == "node") {
        n.only({"kind", "curves"});
        Node c = n["curves"];
        c.array(2);
        return dualgraph::Site::node(c[0].str(), c[1].str());
    }
    n["kind"].error("expected \"free-point\", \"point-on\" or \"node\"");
}

inline json write_site(const dualgraph::Site& s) {
    json out;
    switch (s.kind) {
    case dualgraph::Site::Kind::FreePoint: out["kind"] = "free-point"; break;
    case dualgraph::Site::Kind::PointOn:
        out["kind"] = "point-on";
        out["curve"] = s.first;
        break;
    case dualgraph::Site::Kind::Node:
        out["kind"] = "node";
        out["curves"] = json::array({s.first, s.second});
        break;
    }
    return out;
}

// ---- orbifold data ----

inline std::vector<std::string> read_ids(const Node& n) {
    std::vector<std::string> r;
    for (std::size_t i = 0, k = n.array(); i < k; ++i) r.push_back(n[i].str());
    return r;
}

inline orbifold::OrbifoldDatum read_orbifold(const Node& n) {
    using namespace orbifold;
    OrbifoldDatum d;
    d.graph = read_graph(n["graph"]);
    Node sectors = n["sectors"];
    for (std::size_t i = 0, k = sectors.array(); i < k; ++i) {
        Node s = sectors[i];
        SectorRecord r;
        r.class_id = s["class"].str();
        std::string kind = s["kind"].str();
        if (kind == "identity") {
            s.only({"class", "kind", "open_e"});
            Identity id;
            if (s.has("open_e")) {
                Node o = s["open_e"];
                for (const auto& c : o.keys()) id.open_e[c] = o[c].laurent();
            }
            r.kind = id;
        } else if (kind == "fixed-curve") {
            s.only({"class", "kind", "curve", "normal_weight", "divisor_weights", "quotient_open_e", "quotient_nodes"});
            FixedCurve fc;
            fc.curve_id = s["curve"].str();
            if (s.has("normal_weight")) fc.normal_weight = s["normal_weight"].rational();
            if (s.has("divisor_weights")) {
                Node w = s["divisor_weights"];
                for (const auto& c : w.keys()) fc.divisor_weights[c] = w[c].rational();
            }
            fc.quotient_open_e = s["quotient_open_e"].laurent();
            if (s.has("quotient_nodes")) fc.quotient_nodes = read_ids(s["quotient_nodes"]);
            r.kind = fc;
        } else if (kind == "fixed-point") {
            s.only({"class", "kind", "tangent_weights", "incident"});
            FixedPoint fp;
            Node w = s["tangent_weights"];
            w.array(2);
            fp.tangent_weights = {w[0].rational(), w[1].rational()};
            if (s.has("incident")) fp.incident = read_ids(s["incident"]);
            r.kind = fp;
        } else {
            s["kind"].error("expected \"identity\", \"fixed-curve\" or \"fixed-point\"");
        }
        d.sectors.push_back(std::move(r));
    }
    if (n.has("rotations")) {
        Node rots = n["rotations"];
        for (std::size_t i = 0, k = rots.array(); i < k; ++i) {
            Node s = rots[i];
            s.only({"class", "curve", "alpha", "gamma1", "gamma2", "neighbours"});
            RotationRecord r;
            r.class_id = s["class"].str();
            r.curve_id = s["curve"].str();
            r.alpha = s["alpha"].rational();
            r.gamma1 = s["gamma1"].rational();
            r.gamma2 = s["gamma2"].rational();
            if (s.has("neighbours")) {
                Node nb = s["neighbours"];
                nb.array(2);
                r.neighbours = std::make_pair(nb[0].str(), nb[1].str());
            }
            d.rotations.push_back(std::move(r));
        }
    }
    if (n.has("cover")) {
        Node c = n["cover"];
        c.only({"ramification", "image"});
        CoverDatum cd;
        if (c.has("ramification")) {
            Node r = c["ramification"];
            for (const auto& k : r.keys()) cd.ramification[k] = r[k].integer();
        }
        if (c.has("image")) {
            Node im = c["image"];
            for (const auto& k : im.keys()) cd.image[k] = im[k].str();
        }
        d.cover = cd;
    }
    return d;
}

inline json write_ids(const std::vector<std::string>& ids) {
    json out = json::array();
    for (const auto& s : ids) out.push_back(s);
    return out;
}

inline json write_orbifold(const orbifold::OrbifoldDatum& d) {
    using namespace orbifold;
    json sectors = json::array();
    for (const auto& s : d.sectors) {
        json r;
        r["class"] = s.class_id;
        if (const auto* id = std::get_if<Identity>(&s.kind)) {
            r["kind"] = "identity";
            if (!id->open_e.empty()) {
                json o;
                for (const auto& [c, e] : id->open_e) o[c] = RatExpr(e).str();
                r["open_e"] = o;
            }
        } else if (const auto* fc = std::get_if<FixedCurve>(&s.kind)) {
            r["kind"] = "fixed-curve";
            r["curve"] = fc->curve_id;
            r["normal_weight"] = rat(fc->normal_weight);
            json w = json::object();
            for (const auto& [c, x] : fc->divisor_weights) w[c] = rat(x);
            r["divisor_weights"] = w;
            r["quotient_open_e"] = RatExpr(fc->quotient_open_e).str();
            r["quotient_nodes"] = write_ids(fc->quotient_nodes);
        } else {
            const auto& fp = std::get<FixedPoint>(s.kind);
            r["kind"] = "fixed-point";
            r["tangent_weights"] = json::array({rat(fp.tangent_weights[0]), rat(fp.tangent_weights[1])});
            r["incident"] = write_ids(fp.incident);
        }
        sectors.push_back(r);
    }
    json out;
    out["graph"] = write_graph(d.graph);
    out["sectors"] = sectors;
    if (!d.rotations.empty()) {
        json rots = json::array();
        for (const auto& r : d.rotations) {
            json x;
            x["class"] = r.class_id;
            x["curve"] = r.curve_id;
            x["alpha"] = rat(r.alpha);
            x["gamma1"] = rat(r.gamma1);
            x["gamma2"] = rat(r.gamma2);
            if (r.neighbours) x["neighbours"] = json::array({r.neighbours->first, r.neighbours->second});
            rots.push_back(x);
        }
        out["rotations"] = rots;
    }
    if (d.cover) {
        json c, ram = json::object(), im = json::object();
        for (const auto& [k, v] : d.cover->ramification) ram[k] = v;
        for (const auto& [k, v] : d.cover->image) im[k] = v;
        c["ramification"] = ram;
        c["image"] = im;
        out["cover"] = c;
    }
    return out;
}

// ---- toric pairs ----

inline toric::ToricPair read_pair(const Node& n) {
    toric::ToricPair p;
    Node rays = n["rays"];
    for (std::size_t i = 0, k = rays.array(); i < k; ++i) {
        Node r = rays[i];
        r.array(2);
        p.fan.rays.push_back({r[0].integer(), r[1].integer()});
    }
    Node coeffs = n["coeffs"];
    if (coeffs.array() != p.fan.size()) coeffs.error("one coefficient per ray is required");
    for (std::size_t i = 0; i < p.fan.size(); ++i) p.coeffs.push_back(coeffs[i].rational());
    try {
        p.validate();
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::InvalidFan) fail(ErrorKind::InvalidFan, "at " + rays.where() + ": " + e.what());
        throw;
    }
    return p;
}

inline json write_pair(const toric::ToricPair& p) {
    json rays = json::array(), coeffs = json::array();
    for (const auto& v : p.fan.rays) rays.push_back(json::array({v[0], v[1]}));
    for (const auto& c : p.coeffs) coeffs.push_back(rat(c));
    json out;
    out["rays"] = rays;
    out["coeffs"] = coeffs;
    return out;
}

inline toric::TorusGroup read_group(const Node& n) {
    toric::TorusGroup g;
    for (std::size_t i = 0, k = n.array(); i < k; ++i) {
        Node x = n[i];
        x.array(2);
        g.generators.push_back({x[0].rational(), x[1].rational()});
    }
    return g;
}

inline json write_group(const toric::TorusGroup& g) {
    json out = json::array();
    for (const auto& v : g.generators) out.push_back(json::array({rat(v[0]), rat(v[1])}));
    return out;
}

inline std::vector<Rational> read_rationals(const Node& n) {
    std::vector<Rational> r;
    for (std::size_t i = 0, k = n.array(); i < k; ++i) r.push_back(n[i].rational());
    return r;
}

inline json write_rationals(const std::vector<Rational>& v) {
    json out = json::array();
    for (const auto& x : v) out.push_back(rat(x));
    return out;
}

inline json write_series(const elliptic::QSeries& s) {
    json out = json::array();
    for (const auto& [n, c] : s.entries()) out.push_back(json::array({rat(n), c.str()}));
    return out;
}

/// Stable text form: two-space indentation, keys in insertion order.
inline std::string render(const json& j) { return j.dump(2) + "\n"; }

} // namespace stringy::io
