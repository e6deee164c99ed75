#include "fanclose/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

#include "fanclose/bounds.hpp"
#include "fanclose/family.hpp"
#include "fanclose/fexp.hpp"
#include "fanclose/pell.hpp"
#include "fanclose/reduction.hpp"
#include "fanclose/sieve.hpp"
#include "fanclose/triple.hpp"

#ifndef FANCLOSE_VERSION
#define FANCLOSE_VERSION "0.0.0"
#endif

namespace fc {

namespace {

using json = nlohmann::ordered_json;

json jz(const mpz_class& z) { return z.get_str(); }
json jq(const mpq_class& q) { return q.get_str(); }
json ji(const Interval& x, int d = 25) {
    return json{{"lo", x.lo().str(d, MPFR_RNDD)}, {"hi", x.hi().str(d, MPFR_RNDU)}};
}

mpz_class parse_int(const std::string& s, const std::string& what) {
    mpz_class z;
    if (s.empty() || z.set_str(s, 10) != 0) throw UsageError(what + " must be an integer, got '" + s + "'");
    return z;
}

// Exact value of a decimal literal ("1.16", "-2.5e-3", "1e99") or of "10^k".
mpq_class parse_decimal(const std::string& s, const std::string& what) {
    auto bad = [&] { return UsageError(what + " must be a decimal number, got '" + s + "'"); };
    if (s.rfind("10^", 0) == 0) {
        mpz_class k = parse_int(s.substr(3), what);
        if (k < 0 || k > 100000) throw bad();
        mpz_class v;
        mpz_ui_pow_ui(v.get_mpz_t(), 10, k.get_ui());
        return mpq_class(v);
    }
    std::size_t i = 0;
    bool neg = false;
    if (i < s.size() && (s[i] == '-' || s[i] == '+')) neg = s[i++] == '-';
    std::string digits;
    long scale = 0;
    bool dot = false, any = false;
    for (; i < s.size() && (std::isdigit(static_cast<unsigned char>(s[i])) || s[i] == '.'); ++i) {
        if (s[i] == '.') {
            if (dot) throw bad();
            dot = true;
            continue;
        }
        any = true;
        digits += s[i];
        if (dot) --scale;
    }
    if (!any) throw bad();
    if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
        std::string e = s.substr(i + 1);
        if (e.empty()) throw bad();
        std::size_t used = 0;
        long ev = 0;
        try {
            ev = std::stol(e, &used);
        } catch (...) {
            throw bad();
        }
        if (used != e.size() || ev > 100000 || ev < -100000) throw bad();
        scale += ev;
        i = s.size();
    }
    if (i != s.size()) throw bad();
    mpq_class v{mpz_class(digits)};
    mpz_class p;
    mpz_ui_pow_ui(p.get_mpz_t(), 10, static_cast<unsigned long>(scale < 0 ? -scale : scale));
    if (scale < 0)
        v /= p;
    else
        v *= p;
    v.canonicalize();
    return neg ? mpq_class(-v) : v;
}

mpz_class parse_integer_literal(const std::string& s, const std::string& what) {
    mpq_class q = parse_decimal(s, what);
    if (q.get_den() != 1) throw UsageError(what + " must be an integer");
    return q.get_num();
}

// "2", "1.5e3", "sqrt(3)", "log(7)", each optionally followed by "/n" or "*n".
Interval parse_real(const std::string& text, mpfr_prec_t p) {
    std::string s;
    for (char ch : text)
        if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
    std::size_t op = s.find_last_of("/*");
    if (op != std::string::npos && s.find(')', op) == std::string::npos && op > 0) {
        Interval a = parse_real(s.substr(0, op), p), b = parse_real(s.substr(op + 1), p);
        return s[op] == '/' ? a / b : a * b;
    }
    for (const char* fn : {"sqrt(", "log("}) {
        std::string f(fn);
        if (s.rfind(f, 0) == 0 && s.back() == ')') {
            Interval x = parse_real(s.substr(f.size(), s.size() - f.size() - 1), p);
            return f == "sqrt(" ? sqrt(x) : log(x);
        }
    }
    return Interval::of(parse_decimal(s, "real literal"), p);
}

template <class Fn>
auto with_precision(unsigned digits, unsigned digits_max, Fn fn) {
    for (unsigned d = digits;;) {
        try {
            return fn(PrecisionContext{d});
        } catch (const PrecisionExhausted&) {
            if (d >= digits_max) throw;
            d = std::min(digits_max, d * 2);
        }
    }
}

// Terminating decimal expansion of q, at most `places` digits after the point.
std::string decimal(const mpq_class& q, int places = 10) {
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(places));
    mpz_class n = q.get_num() * scale, v;
    mpz_fdiv_q(v.get_mpz_t(), n.get_mpz_t(), q.get_den_mpz_t());
    std::string digits = mpz_class(abs(v)).get_str();
    if (digits.size() <= static_cast<std::size_t>(places)) digits.insert(0, places + 1 - digits.size(), '0');
    std::string out = digits.substr(0, digits.size() - places) + "." + digits.substr(digits.size() - places);
    while (out.back() == '0') out.pop_back();
    if (out.back() == '.') out.pop_back();
    return (v < 0 ? "-" : "") + out;
}

std::string hex64(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

json load_json_file(const std::string& path, const std::string& what) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read " + what + " " + path);
    try {
        return json::parse(in);
    } catch (const std::exception& e) {
        throw UsageError(what + " " + path + " is not valid JSON: " + e.what());
    }
}

const char* const kSubcommands[] = {"verify-triple", "family", "pell", "sweep", "fexpand", "prsec", "reduce", "sieve"};

// Config file values are injected right after the subcommand token so that
// explicit flags, which come later, win under the take-last policy.
std::vector<std::string> merge_config(const std::vector<std::string>& args, const json& cfg, CLI::App& app) {
    std::size_t at = args.size();
    CLI::App* sub = nullptr;
    for (std::size_t i = 1; i < args.size() && !sub; ++i)
        for (const char* name : kSubcommands)
            if (args[i] == name) {
                at = i + 1;
                sub = app.get_subcommand(name);
                break;
            }
    std::vector<std::string> inject;
    for (auto it = cfg.begin(); it != cfg.end(); ++it) {
        const std::string key = it.key();
        if (key == "caps") continue;
        if (key.size() == 1 && key[0] >= 'a' && key[0] <= 'd') continue;  // prsec caps at top level
        const std::string flag = "--" + key;
        const CLI::Option* opt = sub ? sub->get_option_no_throw(flag) : nullptr;
        if (!opt) opt = app.get_option_no_throw(flag);
        if (!opt) throw UsageError("config key '" + key + "' is not an option of this subcommand");
        if (key == "config") throw UsageError("config files do not nest");
        const json& v = it.value();
        if (v.is_boolean()) {
            if (v.get<bool>())
                inject.push_back(flag);
            else if ((sub && sub->get_option_no_throw("--no-" + key)) || app.get_option_no_throw("--no-" + key))
                inject.push_back("--no-" + key);
        } else if (v.is_array()) {
            for (const auto& e : v) {
                inject.push_back(flag);
                inject.push_back(e.is_string() ? e.get<std::string>() : e.dump());
            }
        } else {
            inject.push_back(flag);
            inject.push_back(v.is_string() ? v.get<std::string>() : v.dump());
        }
    }
    std::vector<std::string> out(args.begin(), args.begin() + static_cast<long>(std::min(at, args.size())));
    out.insert(out.end(), inject.begin(), inject.end());
    if (at < args.size()) out.insert(out.end(), args.begin() + static_cast<long>(at), args.end());
    return out;
}

std::string find_config_path(const std::vector<std::string>& args) {
    std::string path;
    for (std::size_t i = 1; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
        if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
    }
    return path;
}

json effective_options(const CLI::App* app) {
    json j = json::object();
    for (const CLI::Option* o : app->get_options()) {
        const std::string name = o->get_name();
        if (name == "--help" || name == "--version" || name == "--config" || o->count() == 0) continue;
        auto res = o->results();
        j[name] = res.size() == 1 ? json(res.front()) : json(res);
    }
    return j;
}

struct Settings {
    unsigned jobs = 1;
    int digits = 0;  // 0: subcommand default
    unsigned digits_max = 2000;
    std::string config_path, out_path;
    json config = json::object();
};

class Runner {
public:
    Runner(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}
    int run(int argc, const char* const* argv);

private:
    std::ostream& out_;
    std::ostream& err_;
    Settings st_;
    json provenance_;

    unsigned bounds_digits() const { return st_.digits > 0 ? static_cast<unsigned>(st_.digits) : PrecisionContext::bounds().digits; }
    unsigned reduction_digits() const {
        return st_.digits > 0 ? static_cast<unsigned>(st_.digits) : PrecisionContext::reduction().digits;
    }
    void emit(json report, int code);

    // subcommand state
    std::string a1_, a2_;
    long fseq_ = 5;
    std::string f_, k_, check_;
    std::string from_ = "1.16", to_ = "4.1", step_ = "0.01", x_lo_ = "13", x_hi_ = "400";
    bool fallback_n7_ = true;
    int refine_passes_ = 1;
    int level_ = 1;
    std::string r_, s_, case_ = "all", candidate_, c_cap_ = "1e99", checkpoint_;
    long floor_ = 1;
    long sieve_from_ = 2, sieve_to_ = 2;
    unsigned shards_ = 1;

    int verify_triple();
    int family();
    int pell_unit();
    int pell_classes();
    int sweep_cmd();
    int fexpand();
    int prsec();
    int reduce();
    int sieve();

    int last_code_ = 0;
};

void Runner::emit(json report, int code) {
    json j;
    j["provenance"] = provenance_;
    for (auto it = report.begin(); it != report.end(); ++it) j[it.key()] = it.value();
    const std::string text = j.dump(2) + "\n";
    if (st_.out_path.empty()) {
        out_ << text;
    } else {
        std::ofstream f(st_.out_path, std::ios::binary);
        if (!f) throw UsageError("cannot write " + st_.out_path);
        f << text;
    }
    last_code_ = code;
}

int Runner::verify_triple() {
    const mpz_class r = parse_int(a1_, "r"), s = parse_int(a2_, "s");
    json rep;
    rep["r"] = jz(r);
    rep["s"] = jz(s);
    TripleParams tp;
    try {
        tp = build_triple(r, s);
    } catch (const NotATriple& e) {
        rep["is_triple"] = false;
        rep["reason"] = e.what();
        emit(rep, 1);
        return 1;
    }
    rep["is_triple"] = true;
    for (auto [k, v] : {std::pair{"t", &tp.t}, {"f", &tp.f}, {"b", &tp.b}, {"c", &tp.c}, {"A", &tp.A}, {"F", &tp.F}})
        rep[k] = jz(*v);
    json id;
    const mpz_class &t = tp.t, &f = tp.f, &b = tp.b, &c = tp.c;
    id["bc-1=t^2"] = b * c - 1 == t * t;
    id["t=rs+f"] = t == r * s + f;
    id["master r^2+s^2=2frs+f^2"] = master_equation(r, s, f);
    id["A=(2b-1)c-2rst"] = tp.A == (2 * b - 1) * c - 2 * r * s * t;
    id["A=f^2+b"] = tp.A == f * f + b;
    id["F=s-2rf"] = tp.F == s - 2 * r * f;
    id["sF=f^2-r^2"] = s * tp.F == f * f - r * r;
    bool ok = true;
    for (auto& [k, v] : id.items()) ok = ok && v.get<bool>();
    rep["identities"] = id;
    FClassification k = classify_F(tp);
    rep["classification"] = {{"sign_F", k.sign},       {"s=2rf", k.s_eq_2rf},     {"f=r", k.f_eq_r},
                             {"s=2r^2", k.s_eq_2r2},    {"s=2f^2", k.s_eq_2f2},    {"f>r", k.f_gt_r},
                             {"f<r", k.f_lt_r},         {"s>2rf", k.s_gt_2rf},     {"s>2r^2", k.s_gt_2r2},
                             {"s<2f^2", k.s_lt_2f2},    {"c<4b^2", k.c_lt_4b2},    {"gap_ok", k.gap_ok},
                             {"chains_ok", k.chains_ok}, {"le4d_applies", k.le4d_applies}, {"le4d_ok", k.le4d_ok},
                             {"consistent", k.consistent}};
    ok = ok && k.consistent;
    FSequence q = f_sequence(tp, fseq_);
    json F = json::array(), P = json::array();
    for (long i = -1; i <= q.N(); ++i) {
        F.push_back(jz(q.Fi(i)));
        P.push_back(jz(q.Pi(i)));
    }
    rep["F_seq"] = {{"from", -1}, {"F", F}, {"P", P}};
    const unsigned d = bounds_digits();
    ABoundRecord ab = with_precision(d, st_.digits_max, [&](const PrecisionContext& pc) { return a_bounds(tp, pc.bits()); });
    json regimes = json::array();
    for (const auto& g : ab.regimes) regimes.push_back({{"name", g.name}, {"applies", g.applies}, {"holds", g.holds}});
    rep["A_bounds"] = {{"inside_generic", ab.inside}, {"lower", ji(ab.A_lower)}, {"upper", ji(ab.A_upper)}, {"regimes", regimes}};
    emit(rep, ok ? 0 : 1);
    return last_code_;
}

int Runner::family() {
    const mpz_class f = parse_int(f_, "--f");
    const long k = parse_int(k_, "--k").get_si();
    if (f < 2) throw DomainViolation("family needs f >= 2");
    GcdFamilyPoint pt = gcd_family(f, k);
    json rep;
    rep["point"] = {{"f", jz(pt.f)}, {"k", pt.k}, {"r", jz(pt.r)}, {"s", jz(pt.s)}, {"b", jz(pt.b)}, {"c", jz(pt.c)}, {"t", jz(pt.t)}};
    ExclusionVerdict v = family_exclusion(f, k);
    rep["exclusion"] = {{"excluded", v.excluded}, {"verdict", v.verdict},       {"prop", v.prop},
                        {"n_lower", jz(v.n_lower)}, {"n_strict", v.n_strict}, {"trace", v.trace}};
    if (v.min_n_computed >= 0) rep["exclusion"]["min_n_computed"] = v.min_n_computed;
    int code = 0;
    if (!check_.empty()) {
        CongruenceReport cr = congruence_profile(pt, parse_prop(check_));
        json rows = json::array();
        for (const auto& row : cr.rows)
            rows.push_back({{"seq", row.seq}, {"index", row.index}, {"rho", row.rho}, {"recurrence", jz(row.recurrence)},
                            {"closed", jz(row.closed)}, {"displayed", row.displayed}, {"match", row.match}});
        rep["check"] = {{"prop", prop_name(cr.prop)}, {"modulus", jz(cr.modulus)}, {"mismatches", cr.mismatches}, {"rows", rows}};
        if (cr.mismatches) code = 1;
    }
    emit(rep, code);
    return code;
}

int Runner::pell_unit() {
    PellUnit u = fundamental_unit(parse_int(a1_, "D"));
    emit({{"unit", json::array({{{"D", jz(u.D)}, {"x", jz(u.x1)}, {"y", jz(u.y1)}}})}}, 0);
    return 0;
}

int Runner::pell_classes() {
    auto cls = frattini_classes(parse_int(a1_, "f"), parse_int(a2_, "f1"));
    json arr = json::array();
    for (const auto& c : cls)
        arr.push_back({{"f", jz(c.f)}, {"f1", jz(c.f1)}, {"w0", jz(c.w0)}, {"u0", jz(c.u0)}, {"zeta", c.zeta}, {"in_box", c.in_box()}});
    emit({{"classes", arr}}, 0);
    return 0;
}

int Runner::sweep_cmd() {
    SweepOptions opt;
    opt.refine_passes = refine_passes_;
    opt.fallback_n7 = fallback_n7_;
    opt.jobs = st_.jobs;
    opt.x_lo = parse_decimal(x_lo_, "--x-lo").get_d();
    opt.x_hi = parse_decimal(x_hi_, "--x-hi").get_d();
    const mpq_class lo = parse_decimal(from_, "--from"), hi = parse_decimal(to_, "--to"), step = parse_decimal(step_, "--step");
    if (step <= 0) throw UsageError("--step must be positive");
    const unsigned d = bounds_digits();
    auto rows = with_precision(d, st_.digits_max, [&](const PrecisionContext& pc) {
        SweepOptions o = opt;
        o.prec = pc.bits();
        return sweep(lo, hi, step, o);
    });
    std::ostringstream csv;
    csv << "mu_lo,mu_hi,method,n_upper,log10_b,log10_c,fallback\n";
    char buf[64];
    for (const auto& r : rows) {
        csv << decimal(r.mu_lo) << ',' << decimal(r.mu_hi) << ',' << r.method << ',' << r.n_upper.get_str() << ',';
        std::snprintf(buf, sizeof buf, "%.6f,%.6f,%d", r.log10_b, r.log10_c, r.fallback ? 1 : 0);
        csv << buf << '\n';
    }
    json rep;
    rep["cells"] = rows.size();
    json agg = json::array();
    for (const auto& s : aggregate_rows(rows))
        agg.push_back({{"row", s.row}, {"mu_lo", decimal(s.mu_lo)}, {"mu_hi", decimal(s.mu_hi)}, {"log10_b", s.log10_b},
                       {"published_log10_b", s.published_log10_b}});
    rep["rows"] = agg;
    if (st_.out_path.empty()) {
        out_ << csv.str();
        last_code_ = 0;
    } else {
        std::ofstream f(st_.out_path, std::ios::binary);
        if (!f) throw UsageError("cannot write " + st_.out_path);
        f << csv.str();
        out_ << json{{"provenance", provenance_}, {"cells", rep["cells"]}, {"csv", st_.out_path}, {"rows", agg}}.dump(2) << "\n";
    }
    return 0;
}

int Runner::fexpand() {
    const mpz_class r = parse_int(r_, "--r"), s = parse_int(s_, "--s");
    const unsigned d = bounds_digits();
    Interval e = with_precision(d, st_.digits_max, [&](const PrecisionContext& pc) { return estimate_F(level_, r, s, pc.bits()); });
    ExpansionSpec spec = expansion_spec(level_, r, s);
    json env = json::array();
    for (const auto& v : spec.envelopes) env.push_back({{"exact", jq(v)}, {"approx", v.get_d()}});
    json rep;
    rep["level"] = level_;
    rep["r"] = jz(r);
    rep["s"] = jz(s);
    rep["main_term"] = {{"exact", jq(spec.main_term)}, {"approx", spec.main_term.get_d()}};
    rep["envelopes"] = env;
    rep["estimate"] = ji(e);
    int code = 0;
    if (is_triple(r, s)) {
        auto q = f_sequence(build_triple(r, s), level_);
        bool in = e.contains(q.Fi(level_));
        rep["exact_F"] = jz(q.Fi(level_));
        rep["contained"] = in;
        if (!in) code = 1;
    } else {
        rep["exact_F"] = nullptr;
    }
    emit(rep, code);
    return code;
}

int Runner::prsec() {
    PrsecCaps caps = default_prsec_caps();
    json cj = st_.config.contains("caps") ? st_.config["caps"] : st_.config;
    for (auto it = cj.begin(); it != cj.end(); ++it) {
        const std::string key = it.key();
        if (key.size() != 1 || key[0] < 'a' || key[0] > 'd') continue;
        auto& pc = caps[key[0]];
        const json& arr = it.value();
        if (!arr.is_array() || arr.size() != pc.windows.size())
            throw UsageError("caps for case " + key + " need " + std::to_string(pc.windows.size()) + " window entries");
        for (std::size_t w = 0; w < arr.size(); ++w) {
            pc.windows[w].b_cap_upper = arr[w].value("upper", std::string());
            pc.windows[w].b_cap_lower = arr[w].value("lower", std::string());
            pc.windows[w].provenance = "config";
        }
    }
    std::vector<char> which;
    if (case_ == "all")
        which = {'a', 'b', 'c', 'd'};
    else if (case_.size() == 1 && case_[0] >= 'a' && case_[0] <= 'd')
        which = {case_[0]};
    else
        throw UsageError("--case must be a, b, c, d or all");
    const unsigned d = bounds_digits();
    json cases = json::array();
    bool ok = true;
    for (char c : which) {
        PrsecVerdict v = with_precision(d, st_.digits_max, [&](const PrecisionContext& pc) { return prsec_bound(c, caps, pc.bits()); });
        json ws = json::array();
        for (const auto& w : v.windows)
            ws.push_back({{"theta_lo", jq(w.window.theta_lo)},
                          {"theta_hi", jq(w.window.theta_hi)},
                          {"b_cap_upper", w.window.b_cap_upper},
                          {"b_cap_lower", w.window.b_cap_lower},
                          {"cap_source", w.window.provenance},
                          {"upper_chain", w.upper_chain},
                          {"upper", ji(w.upper, 12)},
                          {"upper_ok", w.upper_ok},
                          {"lower_chain", w.lower_chain},
                          {"lower", ji(w.lower, 12)},
                          {"lower_ok", w.lower_ok}});
        cases.push_back({{"case", std::string(1, v.name)},
                         {"level", v.level},
                         {"bound", jq(v.bound)},
                         {"certified", v.certified},
                         {"contradicts_F_below_-1e7", v.contradicts_cofpo},
                         {"windows", ws}});
        ok = ok && v.certified && v.contradicts_cofpo;
    }
    emit({{"cases", cases}, {"certified", ok}}, ok ? 0 : 1);
    return last_code_;
}

int Runner::reduce() {
    if (candidate_.empty()) throw UsageError("reduce needs --candidate");
    json cand;
    if (candidate_.front() == '{') {
        cand = json::parse(candidate_, nullptr, false);
        if (cand.is_discarded()) throw UsageError("--candidate is not valid JSON");
    } else {
        cand = load_json_file(candidate_, "candidate");
    }
    auto str = [&](const char* k) {
        if (!cand.contains(k)) throw UsageError(std::string("candidate lacks '") + k + "'");
        const json& v = cand[k];
        return v.is_string() ? v.get<std::string>() : v.dump();
    };
    const unsigned d = reduction_digits();
    auto trail_json = [](const FixpointResult& res) {
        json t = json::array();
        for (const auto& o : res.trail)
            t.push_back({{"new_bound", jz(o.new_bound)}, {"q", jz(o.q_used)}, {"epsilon", ji(o.epsilon, 12)}, {"passes", o.passes}, {"homogeneous", o.homogeneous}});
        return t;
    };
    json rep;
    int code = 0;
    if (cand.contains("r")) {
        const mpz_class r = parse_int(str("r"), "r"), s = parse_int(str("s"), "s");
        CandidateReduction cr = reduce_candidate(r, s, d, std::max(d, st_.digits_max));
        rep["r"] = jz(r);
        rep["s"] = jz(s);
        rep["digits"] = cr.digits;
        rep["initial_bound"] = jz(cr.result.initial);
        rep["final_bound"] = jz(cr.result.final_bound);
        rep["resolved"] = cr.resolved;
        rep["trail"] = trail_json(cr.result);
        if (!cr.resolved) code = 1;
    } else {
        FixpointResult res = with_precision(d, std::max(d, st_.digits_max), [&](const PrecisionContext& pc) {
            const mpfr_prec_t p = pc.bits();
            ReductionProblem pr{parse_real(str("kappa"), p), parse_real(str("mu"), p), parse_integer_literal(str("M"), "M"),
                                parse_real(str("A"), p), parse_real(str("B"), p)};
            return reduce_to_fixpoint(pr, floor_, pc);
        });
        rep["digits"] = d;
        rep["initial_bound"] = jz(res.initial);
        rep["final_bound"] = jz(res.final_bound);
        rep["trail"] = trail_json(res);
    }
    emit(rep, code);
    return code;
}

int Runner::sieve() {
    SieveSettings ss;
    ss.level = level_;
    ss.c_cap = parse_integer_literal(c_cap_, "--c-cap");
    ss.digits = reduction_digits();
    ss.digits_max = std::max(ss.digits, st_.digits_max);
    if (ss.digits < 173) throw DomainViolation("sieve reductions need at least 173 digits");
    if (level_ < 1 || level_ > 5) throw UsageError("--level must be 1..5");
    auto shards = split_shards(ss, sieve_from_, sieve_to_, shards_, checkpoint_);
    mpz_class max_bound = -1;
    std::size_t survivors = 0;
    auto summary = run_sieve(shards, st_.jobs, [&](const SieveCandidate& c) {
        if (!c.outcome) return;
        ++survivors;
        if (c.outcome->result.final_bound > max_bound) max_bound = c.outcome->result.final_bound;
    });
    json rep;
    rep["level"] = level_;
    rep["from"] = sieve_from_;
    rep["to"] = sieve_to_;
    rep["c_cap"] = c_cap_;
    rep["shards"] = shards.size();
    std::size_t resumed = 0;
    std::uint64_t combined = 0;
    std::vector<std::string> notes;
    std::map<long, std::uint64_t> hashes;
    for (const auto& s : summary.shards) {
        resumed += s.resumed;
        for (const auto& r : s.records) hashes[r.F] = r.hash;
        notes.insert(notes.end(), s.notes.begin(), s.notes.end());
    }
    std::string all;
    for (const auto& [F, h] : hashes) all += std::to_string(F) + ":" + hex64(h) + ";";
    combined = fnv1a64(all);
    rep["F_values"] = hashes.size();
    rep["resumed"] = resumed;
    rep["enumerated"] = summary.total.enumerated;
    rep["filtered"] = summary.total.filtered;
    rep["reduced"] = summary.total.reduced;
    rep["unresolved"] = summary.total.unresolved;
    rep["max_final_bound"] = max_bound >= 0 ? json(max_bound.get_si()) : json(nullptr);
    rep["hash"] = hex64(combined);
    rep["notes"] = notes;
    for (const auto& n : notes) err_ << "note: " << n << "\n";
    const int code = summary.total.unresolved ? 1 : 0;
    emit(rep, code);
    return code;
}

int Runner::run(int argc, const char* const* argv) {
    std::vector<std::string> args(argv, argv + argc);
    CLI::App app{"fanclose: certified computations for D(-1)-quadruple exclusion"};
    app.name("fanclose");
    app.set_version_flag("--version", FANCLOSE_VERSION);
    app.require_subcommand(1);
    app.fallthrough();
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    st_.jobs = std::max(1u, std::thread::hardware_concurrency());
    app.add_option("--jobs", st_.jobs, "worker threads for sweep and sieve")->check(CLI::Range(1u, 1024u));
    app.add_option("--config", st_.config_path, "JSON file whose keys are option names; explicit flags win");
    app.add_option("--digits", st_.digits, "working precision in decimal digits (default: FANCLOSE_DIGITS, else 80; reductions at least 173)")
        ->check(CLI::Range(10, 100000));
    app.add_option("--digits-max", st_.digits_max, "ceiling for automatic precision doubling")->check(CLI::Range(10u, 100000u));
    app.add_option("--out", st_.out_path, "write the report (sweep: the CSV) to this file");

    auto* vt = app.add_subcommand("verify-triple", "check every identity and classification of the triple {1, r^2+1, s^2+1}");
    vt->add_option("r", a1_)->required();
    vt->add_option("s", a2_)->required();
    vt->add_option("--fseq", fseq_, "length of the F_i, P_i sequences")->check(CLI::Range(0L, kMaxFSequence));

    auto* fam = app.add_subcommand("family", "gcd-family point, exclusion trace and congruence checks");
    fam->add_option("--f", f_)->required();
    fam->add_option("--k", k_)->required();
    fam->add_option("--check", check_, "pr34|pr35|pr37|pr38|pr39")->check(CLI::IsMember({"pr34", "pr35", "pr37", "pr38", "pr39"}));

    auto* pell = app.add_subcommand("pell", "Pell units and Frattini classes");
    pell->require_subcommand(1);
    auto* pu = pell->add_subcommand("unit", "fundamental unit of x^2 - D y^2 = 1");
    pu->add_option("D", a1_)->required();
    auto* pc = pell->add_subcommand("classes", "classes of W^2 - (f^2-1) U^2 = f1^2");
    pc->add_option("f", a1_)->required();
    pc->add_option("f1", a2_)->required();

    auto* sw = app.add_subcommand("sweep", "upper bounds on b over theta subintervals; CSV rows");
    sw->add_option("--from", from_)->capture_default_str();
    sw->add_option("--to", to_)->capture_default_str();
    sw->add_option("--step", step_)->capture_default_str();
    sw->add_flag("--fallback-n7,!--no-fallback-n7", fallback_n7_, "allow the n >= 7 bounds when the others stay below 1000")->capture_default_str();
    sw->add_option("--refine-passes", refine_passes_, "Matveev refinement passes per cell")->check(CLI::Range(0, 16))->capture_default_str();
    sw->add_option("--x-lo", x_lo_, "smallest log10 b searched")->capture_default_str();
    sw->add_option("--x-hi", x_hi_, "largest log10 b searched")->capture_default_str();

    auto* fx = app.add_subcommand("fexpand", "F_level expansion and its certified enclosure");
    fx->add_option("--level", level_)->required()->check(CLI::Range(1, 4));
    fx->add_option("--r", r_)->required();
    fx->add_option("--s", s_)->required();

    auto* ps = app.add_subcommand("prsec", "certify the F_i bounds from the b caps");
    ps->add_option("--case", case_, "a, b, c, d or all")->capture_default_str();

    auto* rd = app.add_subcommand("reduce", "Baker-Davenport reduction of a candidate");
    rd->add_option("--candidate", candidate_, "inline JSON or file: {r, s} or {kappa, mu, M, A, B}")->required();
    rd->add_option("--floor", floor_, "stop once the bound is at most this")->check(CLI::Range(1L, 1000000L))->capture_default_str();

    auto* sv = app.add_subcommand("sieve", "F-sieve with reduction of every survivor");
    sv->add_option("--level", level_)->check(CLI::Range(1, 5))->capture_default_str();
    sv->add_option("--from", sieve_from_, "smallest |F|")->required();
    sv->add_option("--to", sieve_to_, "largest |F|")->required();
    sv->add_option("--shards", shards_)->check(CLI::Range(1u, 100000u))->capture_default_str();
    sv->add_option("--checkpoint", checkpoint_, "directory for shard-<k>.jsonl checkpoints");
    sv->add_option("--c-cap", c_cap_, "cap on c")->capture_default_str();

    try {
        const std::string cfg = find_config_path(args);
        if (!cfg.empty()) {
            st_.config = load_json_file(cfg, "config");
            if (!st_.config.is_object()) throw UsageError("config must be a JSON object");
            args = merge_config(args, st_.config, app);
        }
    } catch (const Error& e) {
        err_ << "fanclose: " << e.what() << "\n";
        return static_cast<int>(e.code());
    }
    std::vector<const char*> cargv;
    for (const auto& a : args) cargv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(cargv.size()), cargv.data());
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e, out_, err_);
        return rc == 0 ? 0 : static_cast<int>(ExitCode::Usage);
    }

    CLI::App* sub = app.get_subcommands().front();
    std::string name = sub->get_name();
    json opts = effective_options(&app);
    auto merge_opts = [&](const CLI::App* a) {
        json more = effective_options(a);
        for (auto& [k, v] : more.items()) opts[k] = v;
    };
    merge_opts(sub);
    if (name == "pell") {
        sub = sub->get_subcommands().front();
        name += " " + sub->get_name();
        merge_opts(sub);
    }
    json cfg_for_hash = {{"subcommand", name}, {"options", opts}};
    if (name == "prsec") cfg_for_hash["caps"] = st_.config.contains("caps") ? st_.config["caps"] : st_.config;
    opts.erase("--jobs");  // parallelism never changes results
    cfg_for_hash["options"] = opts;
    provenance_ = {{"tool", "fanclose"}, {"version", FANCLOSE_VERSION}, {"subcommand", name}, {"config_hash", hex64(fnv1a64(cfg_for_hash.dump()))}};

    try {
        if (name == "verify-triple") return verify_triple();
        if (name == "family") return family();
        if (name == "pell unit") return pell_unit();
        if (name == "pell classes") return pell_classes();
        if (name == "sweep") return sweep_cmd();
        if (name == "fexpand") return fexpand();
        if (name == "prsec") return prsec();
        if (name == "reduce") return reduce();
        if (name == "sieve") return sieve();
    } catch (const Error& e) {
        err_ << "fanclose: " << e.what() << "\n";
        return static_cast<int>(e.code());
    } catch (const std::exception& e) {
        err_ << "fanclose: internal error: " << e.what() << "\n";
        return static_cast<int>(ExitCode::CheckFailed);
    }
    err_ << "fanclose: unknown subcommand " << name << "\n";
    return static_cast<int>(ExitCode::Usage);
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    Runner r(out, err);
    return r.run(argc, argv);
}

}  // namespace fc
