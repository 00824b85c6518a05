#include "cyclix/survey.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <set>
#include <thread>

#include "json.hpp"

#include "cyclix/arith.hpp"

namespace cyclix {

namespace {

using nlohmann::ordered_json;

// integrand of li; the domain starts at 2, safely away from the log pole
double rec_log(double t) { return 1.0 / std::log(t); }

double simpson(double a, double b, double fa, double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double li_adapt(double a, double b, double fa, double fm, double fb,
                double whole, double eps, int depth) {
    double m = 0.5 * (a + b);
    double lm = rec_log(0.5 * (a + m));
    double rm = rec_log(0.5 * (m + b));
    double left = simpson(a, m, fa, lm, fm);
    double right = simpson(m, b, fm, rm, fb);
    if (depth <= 0 || std::fabs(left + right - whole) <= 15.0 * eps)
        return left + right + (left + right - whole) / 15.0;
    return li_adapt(a, m, fa, lm, fm, left, 0.5 * eps, depth - 1) +
           li_adapt(m, b, fm, rm, fb, right, 0.5 * eps, depth - 1);
}

// counts gathered from one block of primes
struct BlockCounts {
    i64 pi_ap = 0, pi_cyclic = 0;
    i64 pi_ap_half = 0, pi_cyclic_half = 0;
    i64 excluded = 0, excluded_half = 0;
    std::vector<i64> exceptional;
    std::vector<SurveyRow> rows;
};

BlockCounts scan_block(const CurveModel& m, i64 f, i64 an, i64 lo, i64 hi,
                       i64 xhalf, const std::set<i64>& bad, bool collect_exc,
                       bool with_detail, i64 p0) {
    BlockCounts out;
    for (i64 p : primes_in_range(lo, hi)) {
        if (f > 1 && p % f != an) continue;
        if (bad.count(p)) {
            ++out.excluded;
            if (p <= xhalf) ++out.excluded_half;
            continue;
        }
        GroupStructure gs = group_structure(m, p, p0);
        ++out.pi_ap;
        if (p <= xhalf) ++out.pi_ap_half;
        if (gs.is_cyclic) {
            ++out.pi_cyclic;
            if (p <= xhalf) ++out.pi_cyclic_half;
            if (collect_exc) out.exceptional.push_back(p);
        }
        if (with_detail)
            out.rows.push_back({p, gs.N, gs.a_p, gs.d1, gs.d2, gs.is_cyclic});
    }
    return out;
}

int resolve_workers(int requested) {
    if (requested > 0) return std::min(requested, 256);
    if (const char* env = std::getenv("CYCLIX_WORKERS")) {
        int w = std::atoi(env);
        if (w > 0) return std::min(w, 256);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? (int)std::min<unsigned>(hw, 256) : 1;
}

void atomic_write(const std::string& path, const std::string& body) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) fail_pre("cannot open for writing: " + tmp);
        out << body;
        if (!out.flush()) fail_pre("write failed: " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        fail_pre("rename failed: " + path);
}

ordered_json gate_to_json(const GateResult& g) {
    ordered_json j;
    j["verdict"] = verdict_name(g.verdict);
    j["reasons"] = g.reasons;
    return j;
}

GateResult gate_from_json(const ordered_json& j) {
    GateResult g;
    g.verdict = verdict_from_name(j.at("verdict").get<std::string>());
    g.reasons = j.at("reasons").get<std::vector<std::string>>();
    return g;
}

const char* mode_name(DensityMode m) {
    return m == DensityMode::TruncatedSeries ? "TruncatedSeries"
                                             : "LowerBoundFormula";
}

ordered_json density_to_json(const DensityEstimate& est) {
    ordered_json j;
    j["model_id"] = est.model_id;
    j["f"] = est.f;
    j["a"] = est.a;
    j["Y"] = est.Y;
    j["value_lo"] = est.value_lo.get_str();
    j["value_hi"] = est.value_hi.get_str();
    j["tail"] = est.tail.get_str();
    ordered_json trace = ordered_json::array();
    for (auto [d, gamma] : est.gamma_trace) trace.push_back({d, gamma});
    j["gamma_trace"] = trace;
    j["mode"] = mode_name(est.mode);
    return j;
}

DensityEstimate density_from_json(const ordered_json& j) {
    DensityEstimate est;
    est.model_id = j.at("model_id").get<std::string>();
    est.f = j.at("f").get<i64>();
    est.a = j.at("a").get<i64>();
    est.Y = j.at("Y").get<i64>();
    est.value_lo = mpq_class(j.at("value_lo").get<std::string>());
    est.value_hi = mpq_class(j.at("value_hi").get<std::string>());
    est.tail = mpq_class(j.at("tail").get<std::string>());
    est.value_lo.canonicalize();
    est.value_hi.canonicalize();
    est.tail.canonicalize();
    for (const auto& row : j.at("gamma_trace"))
        est.gamma_trace.push_back({row.at(0).get<i64>(), row.at(1).get<int>()});
    std::string mode = j.at("mode").get<std::string>();
    if (mode == "TruncatedSeries")
        est.mode = DensityMode::TruncatedSeries;
    else if (mode == "LowerBoundFormula")
        est.mode = DensityMode::LowerBoundFormula;
    else
        fail_pre("unknown density mode: " + mode);
    return est;
}

// running state a checkpoint persists and a resume restores
struct Progress {
    i64 next_block = 0;
    BlockCounts acc;
};

void write_checkpoint(const std::string& path, const SurveyReport& rep,
                      i64 block_size, i64 last_block, const BlockCounts& acc) {
    ordered_json j;
    j["schema"] = "cyclix/1";
    j["kind"] = "checkpoint";
    j["model_id"] = rep.model_id;
    j["f"] = rep.f;
    j["a"] = rep.a;
    j["x"] = rep.x;
    j["block"] = block_size;
    j["last_block"] = last_block;
    j["pi_ap"] = acc.pi_ap;
    j["pi_cyclic"] = acc.pi_cyclic;
    j["pi_ap_half"] = acc.pi_ap_half;
    j["pi_cyclic_half"] = acc.pi_cyclic_half;
    j["excluded_bad"] = acc.excluded;
    j["excluded_bad_half"] = acc.excluded_half;
    j["exceptional"] = acc.exceptional;
    atomic_write(path, j.dump(2) + "\n");
}

// restore progress from a checkpoint matching this exact query; any
// mismatch or parse problem falls back to a fresh start
Progress load_checkpoint(const std::string& path, const SurveyReport& rep,
                         i64 block_size) {
    Progress pr;
    std::ifstream in(path, std::ios::binary);
    if (!in) return pr;
    ordered_json j = ordered_json::parse(in, nullptr, false);
    if (j.is_discarded()) return pr;
    try {
        if (j.at("schema") != "cyclix/1" || j.at("kind") != "checkpoint" ||
            j.at("model_id") != rep.model_id || j.at("f") != rep.f ||
            j.at("a") != rep.a || j.at("x") != rep.x ||
            j.at("block") != block_size)
            return pr;
        pr.next_block = j.at("last_block").get<i64>() + 1;
        pr.acc.pi_ap = j.at("pi_ap").get<i64>();
        pr.acc.pi_cyclic = j.at("pi_cyclic").get<i64>();
        pr.acc.pi_ap_half = j.at("pi_ap_half").get<i64>();
        pr.acc.pi_cyclic_half = j.at("pi_cyclic_half").get<i64>();
        pr.acc.excluded = j.at("excluded_bad").get<i64>();
        pr.acc.excluded_half = j.at("excluded_bad_half").get<i64>();
        pr.acc.exceptional = j.at("exceptional").get<std::vector<i64>>();
    } catch (const ordered_json::exception&) {
        return Progress{};
    }
    return pr;
}

}  // namespace

double li(double x) {
    if (x < 2.0) fail_pre("li: argument must be at least 2");
    if (x == 2.0) return 0.0;
    double fa = rec_log(2.0), fb = rec_log(x), fm = rec_log(0.5 * (2.0 + x));
    double whole = simpson(2.0, x, fa, fm, fb);
    // absolute tolerance sized for the 1e-6 relative target
    double eps = 1e-7 * std::max(1.0, std::fabs(whole));
    return li_adapt(2.0, x, fa, fm, fb, whole, eps, 48);
}

const char* verdict_name(GateVerdict v) {
    switch (v) {
        case GateVerdict::FinitelyMany: return "FinitelyMany";
        case GateVerdict::InfinitelyManyUnconditional:
            return "InfinitelyManyUnconditional";
        case GateVerdict::PositiveDensityConditional:
            return "PositiveDensityConditional";
        case GateVerdict::Undetermined: return "Undetermined";
    }
    fail_internal("verdict_name: unknown verdict");
}

GateVerdict verdict_from_name(const std::string& name) {
    for (GateVerdict v :
         {GateVerdict::FinitelyMany, GateVerdict::InfinitelyManyUnconditional,
          GateVerdict::PositiveDensityConditional, GateVerdict::Undetermined})
        if (name == verdict_name(v)) return v;
    fail_pre("unknown gate verdict name: " + name);
}

SurveyReport run_survey(const CurveModel& m, i64 f, i64 a, i64 x,
                        const SurveyOptions& opt) {
    if (f < 1) fail_pre("run_survey: modulus must be positive");
    if (x < 3) fail_pre("run_survey: x must be at least 3");
    i64 an = ((a % f) + f) % f;
    if (std::gcd(an, f) != 1) fail_pre("run_survey: residue not coprime to modulus");
    if (opt.block < 16) fail_pre("run_survey: block size too small");
    if (opt.p0 < kBsgsFloor)
        fail_pre("run_survey: point counting threshold below the BSGS floor");

    SurveyReport rep;
    rep.model_id = model_id(m);
    rep.f = f;
    rep.a = f == 1 ? 1 : an;
    rep.x = x;
    rep.has_detail = opt.with_detail;

    rep.gate = cyclicity_gate(m, f, rep.a);
    bool collect_exc = rep.gate.verdict == GateVerdict::FinitelyMany;

    // the exclusion set: p = 2 and every prime of the model discriminant
    std::set<i64> bad = {2};
    for (auto [p, e] : factorize(std::llabs(disc_g(m)))) bad.insert(p);

    const i64 xhalf = x / 2;
    const i64 nblocks = (x - 1 + opt.block - 1) / opt.block;
    const int workers = resolve_workers(opt.workers);

    Progress pr;
    if (!opt.checkpoint.empty() && !opt.with_detail)
        pr = load_checkpoint(opt.checkpoint, rep, opt.block);

    std::vector<BlockCounts> wave((size_t)workers);
    for (i64 base = pr.next_block; base < nblocks; base += workers) {
        i64 nthis = std::min<i64>(workers, nblocks - base);
        auto work = [&](i64 t) {
            i64 k = base + t;
            i64 lo = 2 + k * opt.block;
            i64 hi = std::min<i64>(lo + opt.block - 1, x);
            wave[(size_t)t] = scan_block(m, f, an, lo, hi, xhalf, bad,
                                         collect_exc, opt.with_detail,
                                         opt.p0);
        };
        if (nthis == 1) {
            work(0);
        } else {
            std::vector<std::thread> pool;
            for (i64 t = 0; t < nthis; ++t) pool.emplace_back(work, t);
            for (auto& th : pool) th.join();
        }
        for (i64 t = 0; t < nthis; ++t) {
            BlockCounts& b = wave[(size_t)t];
            pr.acc.pi_ap += b.pi_ap;
            pr.acc.pi_cyclic += b.pi_cyclic;
            pr.acc.pi_ap_half += b.pi_ap_half;
            pr.acc.pi_cyclic_half += b.pi_cyclic_half;
            pr.acc.excluded += b.excluded;
            pr.acc.excluded_half += b.excluded_half;
            pr.acc.exceptional.insert(pr.acc.exceptional.end(),
                                      b.exceptional.begin(), b.exceptional.end());
            pr.acc.rows.insert(pr.acc.rows.end(), b.rows.begin(), b.rows.end());
            b = BlockCounts{};
        }
        pr.next_block = base + nthis;
        if (!opt.checkpoint.empty() && !opt.with_detail &&
            pr.next_block < nblocks)
            write_checkpoint(opt.checkpoint, rep, opt.block, pr.next_block - 1,
                             pr.acc);
    }

    rep.pi_ap = pr.acc.pi_ap;
    rep.pi_cyclic = pr.acc.pi_cyclic;
    rep.pi_ap_half = pr.acc.pi_ap_half;
    rep.pi_cyclic_half = pr.acc.pi_cyclic_half;
    rep.excluded_bad = pr.acc.excluded;
    rep.excluded_bad_half = pr.acc.excluded_half;
    rep.exceptional = std::move(pr.acc.exceptional);
    rep.detail = std::move(pr.acc.rows);
    rep.last_block = nblocks - 1;

    check_internal(rep.pi_cyclic <= rep.pi_ap, "survey count inversion");
    check_internal(rep.pi_ap_half <= rep.pi_ap, "survey half snapshot overflow");

    rep.ratio = rep.pi_ap ? (double)rep.pi_cyclic / (double)rep.pi_ap : 0.0;
    rep.li_x = li((double)x);
    rep.li_half = xhalf >= 2 ? li((double)xhalf) : 0.0;

    if (opt.with_density) {
        CurveProfile prof = make_profile(m);
        if (!prof.cm) {
            try {
                rep.density = delta_noncm(prof, f, rep.a, 200);
                rep.has_density = true;
            } catch (const Error& e) {
                if (e.kind != ErrKind::unsupported) throw;
            }
        }
    }

    if (!opt.checkpoint.empty()) std::remove(opt.checkpoint.c_str());
    return rep;
}

CompareDiagnostics compare(const SurveyReport& rep, const DensityEstimate& est) {
    CompareDiagnostics d;
    d.note = "conditional-theory comparison, not a proof check";
    if (rep.model_id != est.model_id || rep.f != est.f || rep.a != est.a) {
        d.status = CompareStatus::MismatchedQuery;
        return d;
    }
    mpq_class mid = (est.value_lo + est.value_hi) / 2;
    d.midpoint = mid.get_d();
    d.ratio = rep.ratio;

    double denom = std::max<double>(1.0, (double)(rep.pi_ap + rep.excluded_bad));
    double denom_half =
        std::max<double>(1.0, (double)(rep.pi_ap_half + rep.excluded_bad_half));
    d.deviation = std::fabs((double)rep.pi_cyclic - d.midpoint * rep.li_x) / denom;
    d.deviation_half =
        std::fabs((double)rep.pi_cyclic_half - d.midpoint * rep.li_half) /
        denom_half;

    if (est.value_hi == 0 && rep.pi_cyclic > 16)
        d.status = CompareStatus::Alarm;
    else if (d.deviation > d.deviation_half)
        d.status = CompareStatus::Drifting;
    else
        d.status = CompareStatus::Consistent;
    return d;
}

std::vector<i64> verify_finiteness(const CurveModel& m, i64 f, i64 a, i64 x,
                                   i64 cutoff) {
    GateResult g = cyclicity_gate(m, f, a);
    if (g.verdict != GateVerdict::FinitelyMany)
        fail_pre("verify_finiteness: gate verdict is not FinitelyMany");
    SurveyReport rep = run_survey(m, f, a, x);
    std::vector<i64> out;
    for (i64 p : rep.exceptional)
        if (p > cutoff) out.push_back(p);
    return out;
}

void export_csv(const SurveyReport& rep, const std::string& path) {
    if (!rep.has_detail) fail_pre("export_csv: report built without detail rows");
    std::string body = "p,N,a_p,d1,d2,cyclic\n";
    for (const SurveyRow& r : rep.detail) {
        body += std::to_string(r.p) + ',' + std::to_string(r.N) + ',' +
                std::to_string(r.a_p) + ',' + std::to_string(r.d1) + ',' +
                std::to_string(r.d2) + ',' + (r.cyclic ? '1' : '0') + '\n';
    }
    atomic_write(path, body);
}

std::string report_json_text(const SurveyReport& rep) {
    ordered_json j;
    j["schema"] = "cyclix/1";
    j["kind"] = "survey";
    j["model_id"] = rep.model_id;
    j["f"] = rep.f;
    j["a"] = rep.a;
    j["x"] = rep.x;
    j["pi_ap"] = rep.pi_ap;
    j["pi_cyclic"] = rep.pi_cyclic;
    j["pi_ap_half"] = rep.pi_ap_half;
    j["pi_cyclic_half"] = rep.pi_cyclic_half;
    j["excluded_bad"] = rep.excluded_bad;
    j["excluded_bad_half"] = rep.excluded_bad_half;
    j["ratio"] = rep.ratio;
    j["li_x"] = rep.li_x;
    j["li_half"] = rep.li_half;
    j["gate"] = gate_to_json(rep.gate);
    if (rep.has_density) j["density"] = density_to_json(rep.density);
    j["exceptional"] = rep.exceptional;
    j["last_block"] = rep.last_block;
    if (rep.has_detail) {
        ordered_json rows = ordered_json::array();
        for (const SurveyRow& r : rep.detail)
            rows.push_back({r.p, r.N, r.a_p, r.d1, r.d2, r.cyclic ? 1 : 0});
        j["detail"] = rows;
    }
    return j.dump(2);
}

std::string density_json_text(const DensityEstimate& est) {
    return density_to_json(est).dump(2);
}

void export_json(const SurveyReport& rep, const std::string& path) {
    atomic_write(path, report_json_text(rep) + "\n");
}

SurveyReport import_json(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail_pre("import_json: cannot open " + path);
    ordered_json j = ordered_json::parse(in, nullptr, false);
    if (j.is_discarded()) fail_pre("import_json: not valid JSON: " + path);
    SurveyReport rep;
    try {
        if (j.at("schema") != "cyclix/1" || j.at("kind") != "survey")
            fail_pre("import_json: not a survey summary: " + path);
        rep.model_id = j.at("model_id").get<std::string>();
        rep.f = j.at("f").get<i64>();
        rep.a = j.at("a").get<i64>();
        rep.x = j.at("x").get<i64>();
        rep.pi_ap = j.at("pi_ap").get<i64>();
        rep.pi_cyclic = j.at("pi_cyclic").get<i64>();
        rep.pi_ap_half = j.at("pi_ap_half").get<i64>();
        rep.pi_cyclic_half = j.at("pi_cyclic_half").get<i64>();
        rep.excluded_bad = j.at("excluded_bad").get<i64>();
        rep.excluded_bad_half = j.at("excluded_bad_half").get<i64>();
        rep.ratio = j.at("ratio").get<double>();
        rep.li_x = j.at("li_x").get<double>();
        rep.li_half = j.at("li_half").get<double>();
        rep.gate = gate_from_json(j.at("gate"));
        if (j.contains("density")) {
            rep.density = density_from_json(j.at("density"));
            rep.has_density = true;
        }
        rep.exceptional = j.at("exceptional").get<std::vector<i64>>();
        rep.last_block = j.at("last_block").get<i64>();
        if (j.contains("detail")) {
            rep.has_detail = true;
            for (const auto& row : j.at("detail")) {
                SurveyRow r;
                r.p = row.at(0).get<i64>();
                r.N = row.at(1).get<i64>();
                r.a_p = row.at(2).get<i64>();
                r.d1 = row.at(3).get<i64>();
                r.d2 = row.at(4).get<i64>();
                r.cyclic = row.at(5).get<int>() != 0;
                rep.detail.push_back(r);
            }
        }
    } catch (const ordered_json::exception& e) {
        fail_pre(std::string("import_json: malformed summary: ") + e.what());
    }
    return rep;
}

}  // namespace cyclix
