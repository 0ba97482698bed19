// Command-line front end. Reads one JSON document, prints a canonical
// result. Exit codes: 0 success, 1 mathematical error or failed check,
// 2 input error.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "stringy/dualgraph.hpp"
#include "stringy/elliptic.hpp"
#include "stringy/io.hpp"
#include "stringy/orbifold.hpp"
#include "stringy/stringy.hpp"
#include "stringy/toric.hpp"

using namespace stringy;
using io::json;
using io::Node;

namespace {

struct Options {
    std::string command;
    std::string input;
    std::string mode = "local";
    std::int64_t q_order = 3;
    std::string output = "text";
    std::string method;
    bool euler = false;
    bool verify = false;
};

struct Result {
    json result;
    std::string canonical;
    int code = 0;
};

json load(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::ParseError, "cannot read '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return io::parse_text(ss.str());
}

efn::Mode read_mode(const Options& o, const Node& doc, const char* ambient_key = "ambient") {
    if (o.mode == "local") return efn::Mode::local();
    if (!doc.has(ambient_key)) doc.error(std::string("global mode needs the field '") + ambient_key + "'");
    return efn::Mode::global(doc[ambient_key].expr());
}

std::optional<efn::Perturbation> read_pert(const Node& doc) {
    if (!doc.has("perturbation")) return std::nullopt;
    return io::read_perturbation(doc["perturbation"]);
}

Result expr_result(const exact::RatExpr& e, bool euler) {
    if (euler) {
        auto v = exact::euler_specialize(e);
        return {v.str(), v.str()};
    }
    return {e.str(), e.str()};
}

Result run_classify(const Node& doc) {
    doc.only({"curves", "nodes", "ambient", "perturbation"});
    auto g = dualgraph::ensure_solved(io::read_graph(doc));
    auto cls = dualgraph::classify(g);
    auto adm = dualgraph::admissibility(g);
    std::string text = std::string(dualgraph::to_string(cls)) + "; " + (adm.ok() ? "admissible" : "not admissible");
    if (!adm.ok()) text += " (" + adm.diagnostic + ")";
    json r;
    r["class"] = dualgraph::to_string(cls);
    r["admissible"] = adm.ok();
    r["divisor_admissible"] = adm.divisor;
    r["pair_admissible"] = adm.pair;
    if (!adm.ok()) r["diagnostic"] = adm.diagnostic;
    return {r, text};
}

Result run_discrepancy(const Node& doc) {
    doc.only({"curves", "nodes", "ambient", "perturbation"});
    auto g = dualgraph::solve_discrepancies(io::read_graph(doc));
    json r = json::object();
    std::string text;
    for (const auto& c : g.curves) {
        if (!c.exceptional()) continue;
        r[c.id] = c.coeff->str();
        if (!text.empty()) text += "\n";
        text += c.id + ": " + c.coeff->str();
    }
    return {r, text};
}

Result run_stringy(const Options& o, const Node& doc, bool chi_y) {
    doc.only({"curves", "nodes", "ambient", "perturbation"});
    auto g = io::read_graph(doc);
    auto e = efn::e_stringy(g, read_mode(o, doc), read_pert(doc));
    if (chi_y) e = exact::chi_y_specialize(e);
    return expr_result(e, o.euler);
}

Result run_euler(const Options& o, const Node& doc) {
    doc.only({"curves", "nodes", "ambient", "perturbation"});
    auto g = io::read_graph(doc);
    auto e = exact::euler_specialize(efn::e_stringy(g, read_mode(o, doc), read_pert(doc)));
    return {e.str(), e.str()};
}

Result run_orbifold(const Options& o, const Node& doc) {
    doc.only({"graph", "sectors", "rotations", "cover", "ambient", "perturbation"});
    auto d = io::read_orbifold(doc);
    return expr_result(orbifold::e_orb(d, read_mode(o, doc), read_pert(doc)), o.euler);
}

Result run_mckay(const Options& o, const Node& doc) {
    doc.only({"cover", "quotient", "cover_ambient", "quotient_ambient"});
    auto cover = io::read_orbifold(doc["cover"]);
    auto quotient = io::read_graph(doc["quotient"]);
    auto cm = read_mode(o, doc, "cover_ambient");
    auto qm = read_mode(o, doc, "quotient_ambient");
    auto lhs = orbifold::e_orb(cover, cm), rhs = efn::e_stringy(quotient, qm);
    bool ok = orbifold::mckay_verify(cover, quotient, cm, qm);
    json r;
    r["pass"] = ok;
    r["e_orb"] = lhs.str();
    r["e_stringy"] = rhs.str();
    std::string text = ok ? "PASS: e_orb(cover) = e_stringy(quotient) = " + lhs.str()
                          : "FAIL: e_orb(cover) = " + lhs.str() + ", e_stringy(quotient) = " + rhs.str();
    return {r, text, ok ? 0 : 1};
}

Result run_blowup(const Options& o, const Node& doc) {
    doc.only({"curves", "nodes", "ambient", "perturbation", "sites"});
    auto g = io::read_graph(doc);
    std::vector<dualgraph::Site> sites;
    Node s = doc["sites"];
    for (std::size_t i = 0, k = s.array(); i < k; ++i) sites.push_back(io::read_site(s[i]));
    if (o.verify) {
        auto amb = doc.has("ambient") ? doc["ambient"].expr() : exact::RatExpr(efn::w_pow(exact::Rational(2)));
        auto rep = efn::verify_functoriality(g, sites, amb);
        json r;
        r["pass"] = rep.ok();
        r["local"] = rep.local_after.str();
        r["global"] = rep.global_after.str();
        std::string text = rep.ok() ? "PASS: e_stringy unchanged in local and global mode"
                                    : std::string("FAIL: e_stringy changed in ") + (rep.local ? "global" : "local") + " mode";
        return {r, text, rep.ok() ? 0 : 1};
    }
    auto h = g;
    for (const auto& site : sites) h = dualgraph::blowup(h, site);
    json r = io::write_graph(h);
    std::string text = r.dump(2);
    return {r, text};
}

void pair_keys(const Node& doc) { doc.only({"rays", "coeffs", "group", "perturbation", "cocharacter"}); }

toric::TorusGroup group_of(const Node& doc) {
    return doc.has("group") ? io::read_group(doc["group"]) : toric::TorusGroup{};
}

Result run_rigidity(const Options& o, const Node& doc) {
    pair_keys(doc);
    auto p = io::read_pair(doc);
    auto rep = elliptic::rigidity_check(p, group_of(doc), o.q_order);
    std::string n = std::to_string(o.q_order);
    std::string text;
    if (rep.vanishes) {
        text = "PASS: all coefficients zero through q^" + n;
    } else {
        for (const auto& [k, c] : rep.series.entries())
            if (!c.is_zero()) {
                text = "FAIL: coefficient of q^" + k.str() + " is " + c.str();
                break;
            }
    }
    json r;
    r["pass"] = rep.vanishes;
    r["q0_vanishes"] = rep.q0_vanishes;
    r["order"] = o.q_order;
    r["series"] = io::write_series(rep.series);
    return {r, text, rep.vanishes ? 0 : 1};
}

Result run_elliptic(const Options& o, const Node& doc) {
    pair_keys(doc);
    auto p = io::read_pair(doc);
    std::optional<std::vector<exact::Rational>> pert;
    if (doc.has("perturbation")) pert = io::read_rationals(doc["perturbation"]);
    std::string method = o.method.empty() ? (doc.has("group") || doc.has("cocharacter") ? "equivariant" : "smooth") : o.method;
    elliptic::QSeries s;
    if (method == "smooth") {
        if (doc.has("group")) doc["group"].error("the smooth method takes no group");
        s = elliptic::ell_smooth_pair(p, o.q_order, pert);
    } else if (method == "closed") {
        if (doc.has("group") || doc.has("perturbation")) doc.error("the closed method takes no group or perturbation");
        s = elliptic::ell_admissible_closed(p, o.q_order);
    } else {
        elliptic::EquivariantOptions opts;
        opts.perturbation = pert;
        if (doc.has("cocharacter")) {
            Node c = doc["cocharacter"];
            c.array(2);
            opts.cocharacter = lattice::Vec2{c[0].integer(), c[1].integer()};
        }
        s = elliptic::ell_toric_equivariant(p, group_of(doc), o.q_order, opts);
    }
    return {io::write_series(s), s.str()};
}

Result run_limit(const Node& doc) {
    doc.only({"numerator", "denominator", "variable"});
    auto num = doc["numerator"].laurent();
    auto den = doc.has("denominator") ? doc["denominator"].laurent() : exact::QLaurent(1);
    std::string v = doc["variable"].str();
    exact::Var var;
    if (v == "u") var = exact::Var::U;
    else if (v == "v") var = exact::Var::V;
    else if (v == "s") var = exact::Var::S;
    else if (v == "y") var = exact::Var::Y;
    else if (v == "t") var = exact::Var::Z;
    else doc["variable"].error("expected one of u, v, s, y, t");
    auto e = exact::limit_at_one(num, den, var);
    return {e.str(), e.str()};
}

Result dispatch(const Options& o) {
    json j = load(o.input);
    Node doc(j, "");
    const std::string& c = o.command;
    if (c == "classify") return run_classify(doc);
    if (c == "discrepancy") return run_discrepancy(doc);
    if (c == "stringy") return run_stringy(o, doc, false);
    if (c == "chi-y") return run_stringy(o, doc, true);
    if (c == "euler") return run_euler(o, doc);
    if (c == "orbifold") return run_orbifold(o, doc);
    if (c == "mckay-check") return run_mckay(o, doc);
    if (c == "blowup") return run_blowup(o, doc);
    if (c == "toric-rigidity") return run_rigidity(o, doc);
    if (c == "elliptic") return run_elliptic(o, doc);
    return run_limit(doc);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stringy E-functions, orbifold E-functions and elliptic genera of surface pairs"};
    app.require_subcommand(1);
    Options o;
    struct CommandInfo {
        const char* name;
        const char* help;
    };
    const CommandInfo commands[] = {
        {"classify", "singularity class and admissibility of a resolution graph"},
        {"discrepancy", "solve the discrepancies of the exceptional curves"},
        {"stringy", "stringy E-function of a resolution graph"},
        {"chi-y", "chi_y specialization of the stringy E-function"},
        {"euler", "stringy Euler number"},
        {"orbifold", "orbifold E-function of an orbifold datum"},
        {"mckay-check", "compare e_orb of a cover with e_stringy of the quotient"},
        {"blowup", "blow up a graph at a list of sites"},
        {"toric-rigidity", "vanishing of the orbifold elliptic genus of a Calabi-Yau toric pair"},
        {"elliptic", "elliptic genus of a toric pair as a truncated q-series"},
        {"limit", "limit of a quotient of Laurent polynomials as a variable tends to 1"},
    };
    for (const auto& s : commands) {
        auto* sub = app.add_subcommand(s.name, s.help);
        sub->add_option("input", o.input, "JSON input file")->required();
        sub->add_option("--mode", o.mode, "local or global")->check(CLI::IsMember({"local", "global"}));
        sub->add_option("--q-order", o.q_order, "highest power of q")->check(CLI::Range(0, 64));
        sub->add_option("--output", o.output, "text or json")->check(CLI::IsMember({"text", "json"}));
        std::string name = s.name;
        if (name == "stringy" || name == "chi-y" || name == "orbifold") sub->add_flag("--euler", o.euler, "print the Euler number");
        if (name == "elliptic")
            sub->add_option("--method", o.method, "smooth, closed or equivariant")
                ->check(CLI::IsMember({"smooth", "closed", "equivariant"}));
        if (name == "blowup") sub->add_flag("--verify", o.verify, "check that e_stringy is unchanged");
        sub->callback([&o, name] { o.command = name; });
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    try {
        Result r = dispatch(o);
        if (o.output == "json") {
            json out;
            out["result"] = r.result;
            out["canonical"] = r.canonical;
            std::cout << out.dump(2) << "\n";
        } else {
            std::cout << r.canonical << "\n";
        }
        return r.code;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.is_input_error() ? 2 : 1;
    }
}
