// cyclix: command line front end over the curve, galois2, density and
// survey modules.  One subcommand per library operation, a flat key=value
// config file with flag overrides, and a single result value rendered
// either as a table or as JSON (--json).  Exit codes: 0 success, 2
// precondition violation, 3 unsupported input, 1 internal error, 64 usage.

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cyclix/arith.hpp"
#include "cyclix/common.hpp"
#include "cyclix/curve.hpp"
#include "cyclix/density.hpp"
#include "cyclix/galois2.hpp"
#include "cyclix/survey.hpp"

using nlohmann::ordered_json;
using namespace cyclix;

namespace {

struct Opts {
    std::string curve;  // "A,B,C"; empty until given
    i64 f = 1, a = 1;
    i64 x = 0;   // survey/verify range end; 0 means not given
    i64 me = 0;  // entanglement modulus override; 0 means none
    std::vector<i64> exceptional;  // declared cyclic primes for verify
    i64 y = 200;                   // density truncation point
    i64 p0 = 10000;                // charsum/BSGS switchover
    i64 workers = 0;               // 0: CYCLIX_WORKERS env, else hardware
    std::string output_dir = ".";

    i64 n = -1;       // h argument
    i64 D = 0;        // gd core
    i64 m = 0;        // find-b congruence modulus; 0 means unconstrained
    i64 cutoff = 100;  // verify cutoff
    i64 block = 1 << 16;
    bool density = false, detail = false;
    std::string csv, out, checkpoint;
    bool json = false;
};

bool parse_i64(const std::string& s, i64* out) {
    size_t i = 0, j = s.size();
    while (i < j && std::isspace((unsigned char)s[i])) ++i;
    while (j > i && std::isspace((unsigned char)s[j - 1])) --j;
    if (i == j) return false;
    errno = 0;
    char* end = nullptr;
    long long v = std::strtoll(s.c_str() + i, &end, 10);
    if (errno == ERANGE || end != s.c_str() + j) return false;
    *out = v;
    return true;
}

bool parse_i64_list(const std::string& s, std::vector<i64>* out) {
    out->clear();
    if (s.empty()) return true;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, ',')) {
        i64 v;
        if (!parse_i64(item, &v)) return false;
        out->push_back(v);
    }
    return true;
}

// config lines and flags spell the same keys; dashes and underscores are
// interchangeable so --output-dir and output_dir both work
std::string norm_key(const std::string& key) {
    std::string k = key;
    std::replace(k.begin(), k.end(), '-', '_');
    return k;
}

bool is_bool_key(const std::string& k) {
    return k == "json" || k == "density" || k == "detail";
}

enum class Apply { Ok, UnknownKey, BadValue };

Apply apply_kv(Opts& o, const std::string& key, const std::string& val) {
    const std::string k = norm_key(key);
    i64* iv = nullptr;
    if (k == "f") iv = &o.f;
    else if (k == "a") iv = &o.a;
    else if (k == "x") iv = &o.x;
    else if (k == "me") iv = &o.me;
    else if (k == "y") iv = &o.y;
    else if (k == "p0") iv = &o.p0;
    else if (k == "workers") iv = &o.workers;
    else if (k == "n") iv = &o.n;
    else if (k == "D" || k == "d") iv = &o.D;
    else if (k == "m") iv = &o.m;
    else if (k == "cutoff") iv = &o.cutoff;
    else if (k == "block") iv = &o.block;
    if (iv) return parse_i64(val, iv) ? Apply::Ok : Apply::BadValue;

    if (k == "curve") { o.curve = val; return Apply::Ok; }
    if (k == "output_dir") { o.output_dir = val; return Apply::Ok; }
    if (k == "csv") { o.csv = val; return Apply::Ok; }
    if (k == "out") { o.out = val; return Apply::Ok; }
    if (k == "checkpoint") { o.checkpoint = val; return Apply::Ok; }
    if (k == "exceptional")
        return parse_i64_list(val, &o.exceptional) ? Apply::Ok
                                                   : Apply::BadValue;
    if (is_bool_key(k)) {
        bool* bv = k == "json" ? &o.json
                 : k == "density" ? &o.density
                                  : &o.detail;
        if (val == "true" || val == "1") *bv = true;
        else if (val == "false" || val == "0") *bv = false;
        else return Apply::BadValue;
        return Apply::Ok;
    }
    return Apply::UnknownKey;
}

void load_config(Opts& o, const std::string& path) {
    std::ifstream in(path);
    if (!in) fail_pre("config: cannot open " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        size_t i = line.find_first_not_of(" \t\r");
        if (i == std::string::npos) continue;
        size_t eq = line.find('=');
        const std::string where = path + ":" + std::to_string(lineno);
        if (eq == std::string::npos)
            fail_pre("config: expected key=value at " + where);
        auto trim = [](std::string s) {
            size_t b = s.find_first_not_of(" \t\r");
            size_t e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string()
                                          : s.substr(b, e - b + 1);
        };
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        switch (apply_kv(o, key, val)) {
            case Apply::Ok: break;
            case Apply::UnknownKey:
                fail_pre("config: unknown key \"" + key + "\" at " + where);
            case Apply::BadValue:
                fail_pre("config: bad value for \"" + key + "\" at " + where);
        }
    }
}

CurveModel parse_model(const std::string& s) {
    std::vector<i64> part;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, ',')) {
        i64 v;
        if (!parse_i64(item, &v))
            fail_pre("curve: expected three integers \"A,B,C\", got \"" + s +
                     "\"");
        part.push_back(v);
    }
    if (part.size() != 3)
        fail_pre("curve: expected three integers \"A,B,C\", got \"" + s +
                 "\"");
    return CurveModel{part[0], part[1], part[2]};
}

CurveModel need_curve(const Opts& o, const char* cmd) {
    if (o.curve.empty()) fail_pre(std::string(cmd) + ": --curve required");
    return parse_model(o.curve);
}

// file artifacts land under --output-dir unless the name is absolute
std::string artifact_path(const Opts& o, const std::string& name) {
    namespace fs = std::filesystem;
    fs::path p(name);
    if (p.is_relative()) p = fs::path(o.output_dir) / p;
    if (p.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(p.parent_path(), ec);
        if (ec) fail_pre("cannot create output directory: " +
                         p.parent_path().string());
    }
    return p.string();
}

const char* k2_kind_name(K2Kind k) {
    switch (k) {
        case K2Kind::Trivial: return "Trivial";
        case K2Kind::Quadratic: return "Quadratic";
        case K2Kind::CyclicCubic: return "CyclicCubic";
        case K2Kind::S3: return "S3";
    }
    fail_internal("k2_kind_name: unknown kind");
}

CurveProfile profile_of(const Opts& o, const CurveModel& m) {
    return o.me ? make_profile(m, o.me) : make_profile(m);
}

ordered_json cmd_analyze(const Opts& o) {
    CurveModel m = need_curve(o, "analyze");
    CurveProfile pr = profile_of(o, m);
    ordered_json j;
    j["schema"] = "cyclix/1";
    j["kind"] = "analyze";
    j["model_id"] = model_id(m);
    j["disc_g"] = disc_g(m);
    j["disc_E"] = disc_E(m);
    ordered_json k2;
    k2["kind"] = k2_kind_name(pr.k2.kind);
    k2["degree"] = k2_degree(pr.k2);
    k2["ab_degree"] = k2_ab_degree(pr.k2);
    k2["f2"] = pr.k2.f2;
    k2["D"] = pr.k2.D;
    k2["d2"] = pr.k2.d2;
    k2["roots"] = pr.k2.roots;
    if (!pr.k2.cubic_kernel.empty()) k2["cubic_kernel"] = pr.k2.cubic_kernel;
    j["k2"] = k2;
    j["ent_mod"] = pr.ent_mod;
    j["j_invariant"] = pr.j.get_str();
    j["cm"] = pr.cm;
    if (pr.cm) {
        j["cm_D"] = pr.cm_D;
        j["cm_maximal"] = pr.cm_maximal;
    }
    return j;
}

ordered_json cmd_gate(const Opts& o) {
    CurveModel m = need_curve(o, "gate");
    GateResult g = cyclicity_gate(m, o.f, o.a);
    ordered_json j;
    j["schema"] = "cyclix/1";
    j["kind"] = "gate";
    j["model_id"] = model_id(m);
    j["f"] = o.f;
    j["a"] = o.a;
    j["verdict"] = verdict_name(g.verdict);
    j["reasons"] = g.reasons;
    return j;
}

ordered_json cmd_density(const Opts& o) {
    CurveModel m = need_curve(o, "density");
    DensityEstimate est = delta_noncm(profile_of(o, m), o.f, o.a, o.y);
    ordered_json j;
    j["schema"] = "cyclix/1";
    j["kind"] = "density";
    j["density"] = ordered_json::parse(density_json_text(est));
    j["approx_lo"] = est.value_lo.get_d();
    j["approx_hi"] = est.value_hi.get_d();
    return j;
}

ordered_json cmd_gd(const Opts& o) {
    if (o.D < 1) fail_pre("gd: --D required (positive squarefree core)");
    i64 count = gd_count(o.D, o.f, o.a);
    i64 bound = gd_bound(o.D, o.f);
    ordered_json j;
    j["schema"] = "cyclix/1";
    j["kind"] = "gd";
    j["D"] = o.D;
    j["f"] = o.f;
    j["a"] = o.a;
    j["count"] = count;
    j["bound"] = bound;
    j["within"] = count <= bound;
    return j;
}

ordered_json cmd_find_b(const Opts& o) {
    CurveModel m = need_curve(o, "find-b");
    TwoTorsionField k2 = classify_k2(m);
    ordered_json j;
    j["schema"] = "cyclix/1";
    j["kind"] = "find-b";
    j["model_id"] = model_id(m);
    j["f2"] = k2.f2;
    if (o.m > 0) {
        CongruentB r = find_b_congruent(k2, o.m, o.a);
        j["m"] = o.m;
        j["a"] = o.a;
        j["exceptional"] = r.exceptional;
        if (!r.exceptional) j["b"] = r.b;
    } else {
        j["b"] = find_b(k2);
    }
    return j;
}

ordered_json cmd_survey(const Opts& o) {
    CurveModel m = need_curve(o, "survey");
    if (o.x < 3) fail_pre("survey: --x required (at least 3)");
    SurveyOptions sopt;
    sopt.with_density = o.density;
    sopt.with_detail = o.detail || !o.csv.empty();
    sopt.workers = (int)o.workers;
    sopt.block = o.block;
    sopt.p0 = o.p0;
    if (!o.checkpoint.empty())
        sopt.checkpoint = artifact_path(o, o.checkpoint);
    SurveyReport rep = run_survey(m, o.f, o.a, o.x, sopt);
    if (!o.csv.empty()) export_csv(rep, artifact_path(o, o.csv));
    if (!o.out.empty()) export_json(rep, artifact_path(o, o.out));
    return ordered_json::parse(report_json_text(rep));
}

ordered_json cmd_verify(const Opts& o) {
    CurveModel m = need_curve(o, "verify");
    if (o.x < 3) fail_pre("verify: --x required (at least 3)");
    std::vector<i64> found = verify_finiteness(m, o.f, o.a, o.x, o.cutoff);
    std::vector<i64> declared = o.exceptional;
    std::sort(declared.begin(), declared.end());
    std::vector<i64> unexpected;
    for (i64 p : found)
        if (!std::binary_search(declared.begin(), declared.end(), p))
            unexpected.push_back(p);
    ordered_json j;
    j["schema"] = "cyclix/1";
    j["kind"] = "verify";
    j["model_id"] = model_id(m);
    j["f"] = o.f;
    j["a"] = o.a;
    j["x"] = o.x;
    j["cutoff"] = o.cutoff;
    j["cyclic_beyond_cutoff"] = found;
    j["declared"] = declared;
    j["unexpected"] = unexpected;
    j["clean"] = unexpected.empty();
    return j;
}

ordered_json cmd_h(const Opts& o) {
    if (o.n < 0) fail_pre("h: --n required");
    ordered_json j;
    j["schema"] = "cyclix/1";
    j["kind"] = "h";
    j["n"] = o.n;
    j["h"] = h_function(o.n);
    return j;
}

std::string scalar_text(const ordered_json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_null()) return "-";
    return v.dump();
}

bool all_scalar(const ordered_json& a) {
    for (const auto& e : a)
        if (e.is_structured()) return false;
    return true;
}

std::string array_text(const std::string& key, const ordered_json& a) {
    if (key == "detail")
        return std::to_string(a.size()) + " rows (use --json or --csv)";
    if (a.empty()) return "(none)";
    std::string s;
    if (all_scalar(a)) {
        for (const auto& e : a) {
            if (!s.empty()) s += ", ";
            s += scalar_text(e);
        }
        return s;
    }
    // arrays of scalar tuples, like the gamma trace: one d:g item each
    for (const auto& e : a) {
        if (!e.is_array() || !all_scalar(e))
            return std::to_string(a.size()) + " rows (use --json)";
        std::string item;
        for (const auto& c : e) {
            if (!item.empty()) item += ":";
            item += scalar_text(c);
        }
        if (!s.empty()) s += ", ";
        s += item;
    }
    return s;
}

// plain aligned key/value view of the same object --json prints
void render(const ordered_json& j, std::ostream& os, int indent = 0) {
    size_t width = 0;
    for (const auto& [k, v] : j.items())
        if (!v.is_object()) width = std::max(width, k.size());
    for (const auto& [k, v] : j.items()) {
        os << std::string(indent, ' ');
        if (v.is_object()) {
            os << k << ":\n";
            render(v, os, indent + 2);
        } else {
            os << k << std::string(width - k.size() + 2, ' ')
               << (v.is_array() ? array_text(k, v) : scalar_text(v)) << "\n";
        }
    }
}

void usage(std::ostream& os) {
    os << "usage: cyclix <subcommand> [--flag value ...]\n"
          "\n"
          "subcommands\n"
          "  analyze  2-torsion field, conductors, curve profile\n"
          "             --curve A,B,C [--me M]\n"
          "  gate     what the theory says about cyclic p = a mod f\n"
          "             --curve A,B,C --f F --a A\n"
          "  density  certified rational density bracket (non-CM)\n"
          "             --curve A,B,C --f F --a A [--y Y] [--me M]\n"
          "  gd       norm-form residue count against its proven bound\n"
          "             --D D --f F --a A\n"
          "  find-b   obstruction residue b mod f2\n"
          "             --curve A,B,C [--m M --a A]\n"
          "  survey   count cyclic reductions over primes up to x\n"
          "             --curve A,B,C --f F --a A --x X [--density]\n"
          "             [--detail] [--csv FILE] [--out FILE]\n"
          "             [--checkpoint FILE] [--workers N] [--block N]\n"
          "             [--p0 N]\n"
          "  verify   cyclic primes beyond a cutoff (finite classes only)\n"
          "             --curve A,B,C --f F --a A --x X [--cutoff C]\n"
          "             [--exceptional P1,P2,...]\n"
          "  h        multiplicative divisor-type bound function\n"
          "             --n N\n"
          "\n"
          "common flags\n"
          "  --config FILE    flat key=value defaults; flags win\n"
          "  --json           print the JSON result instead of the table\n"
          "  --output-dir D   directory for file artifacts (default .)\n"
          "\n"
          "workers default to the CYCLIX_WORKERS environment variable, then\n"
          "the hardware concurrency.\n";
}

int run(int argc, char** argv) {
    if (argc < 2) {
        usage(std::cerr);
        return 64;
    }
    std::string cmd = argv[1];
    if (cmd == "help" || cmd == "--help" || cmd == "-h") {
        usage(std::cout);
        return 0;
    }
    static const std::set<std::string> kCmds = {
        "analyze", "gate", "density", "gd", "find-b", "survey", "verify",
        "h"};
    if (!kCmds.count(cmd)) {
        std::cerr << "cyclix: unknown subcommand \"" << cmd << "\"\n\n";
        usage(std::cerr);
        return 64;
    }

    // collect flags in order; --config is applied first so flags win
    std::vector<std::pair<std::string, std::string>> kvs;
    std::string config_path;
    for (int i = 2; i < argc; ++i) {
        std::string arg = argv[i];
        if (arg.rfind("--", 0) != 0) {
            std::cerr << "cyclix: unexpected argument \"" << arg << "\"\n";
            return 64;
        }
        std::string key = arg.substr(2), val;
        bool has_val = false;
        if (auto eq = key.find('='); eq != std::string::npos) {
            val = key.substr(eq + 1);
            key = key.substr(0, eq);
            has_val = true;
        }
        if (!has_val && !is_bool_key(norm_key(key))) {
            if (i + 1 >= argc) {
                std::cerr << "cyclix: missing value for --" << key << "\n";
                return 64;
            }
            val = argv[++i];
            has_val = true;
        }
        if (!has_val) val = "true";
        if (norm_key(key) == "config") {
            config_path = val;
            continue;
        }
        kvs.emplace_back(key, val);
    }

    Opts o;
    if (!config_path.empty()) load_config(o, config_path);
    for (const auto& [key, val] : kvs) {
        switch (apply_kv(o, key, val)) {
            case Apply::Ok: break;
            case Apply::UnknownKey:
                std::cerr << "cyclix: unknown flag --" << key << "\n";
                return 64;
            case Apply::BadValue:
                std::cerr << "cyclix: bad value for --" << key << ": \""
                          << val << "\"\n";
                return 64;
        }
    }

    if (o.f < 1) fail_pre("f must be positive");
    if (std::gcd(((o.a % o.f) + o.f) % o.f, o.f) != 1)
        fail_pre("gcd(a, f) = 1 required");

    ordered_json result;
    if (cmd == "analyze") result = cmd_analyze(o);
    else if (cmd == "gate") result = cmd_gate(o);
    else if (cmd == "density") result = cmd_density(o);
    else if (cmd == "gd") result = cmd_gd(o);
    else if (cmd == "find-b") result = cmd_find_b(o);
    else if (cmd == "survey") result = cmd_survey(o);
    else if (cmd == "verify") result = cmd_verify(o);
    else result = cmd_h(o);

    if (o.json) std::cout << result.dump(2) << "\n";
    else render(result, std::cout);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const Error& e) {
        std::cerr << "cyclix: " << e.what() << "\n";
        return exit_code(e.kind);
    } catch (const std::exception& e) {
        std::cerr << "cyclix: internal: " << e.what() << "\n";
        return 1;
    }
}
