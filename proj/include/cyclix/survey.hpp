#pragma once

// Prime survey engine: walk the primes p = a mod f up to x, decide
// cyclicity of each good reduction, aggregate the counts the theory talks
// about, and compare them against the conditional density bracket.  Runs
// block-parallel with deterministic output and optional checkpointing.

#include <string>
#include <vector>

#include "cyclix/common.hpp"
#include "cyclix/curve.hpp"
#include "cyclix/density.hpp"
#include "cyclix/galois2.hpp"

namespace cyclix {

struct SurveyRow {
    i64 p = 0;
    i64 N = 0;     // group order
    i64 a_p = 0;   // trace
    i64 d1 = 1, d2 = 1;
    bool cyclic = true;

    friend bool operator==(const SurveyRow&, const SurveyRow&) = default;
};

struct SurveyReport {
    std::string model_id;
    i64 f = 1, a = 1;
    i64 x = 0;

    // counts at x, and the snapshot at x/2 used for trend diagnostics
    i64 pi_ap = 0, pi_cyclic = 0;
    i64 pi_ap_half = 0, pi_cyclic_half = 0;
    // primes in the progression dividing 2 disc that the counts exclude
    i64 excluded_bad = 0, excluded_bad_half = 0;

    double ratio = 0.0;  // pi_cyclic / pi_ap, 0 when the class is empty
    double li_x = 0.0, li_half = 0.0;

    GateResult gate;
    bool has_density = false;   // filled only on request for non-CM models
    DensityEstimate density;

    // all cyclic primes found, collected when the gate says FinitelyMany
    std::vector<i64> exceptional;

    bool has_detail = false;
    std::vector<SurveyRow> detail;

    i64 last_block = -1;  // final processed block index

    friend bool operator==(const SurveyReport&, const SurveyReport&) = default;
};

struct SurveyOptions {
    bool with_density = false;  // attach delta_noncm(f, a, Y = 200)
    bool with_detail = false;   // keep one row per counted prime
    int workers = 0;            // 0: CYCLIX_WORKERS env, else hardware
    i64 block = 1 << 16;        // primes per work unit
    i64 p0 = 10000;             // charsum/BSGS switch for point counting
    std::string checkpoint;     // path; empty disables checkpointing
};

// exact counts over the progression; deterministic for any worker count
// and block size.  With a checkpoint path, partial counts are persisted
// each wave and a matching interrupted run resumes where it stopped
// (detail mode always rescans from the start).
SurveyReport run_survey(const CurveModel& m, i64 f, i64 a, i64 x,
                        const SurveyOptions& opt = {});

enum class CompareStatus {
    Consistent,       // deviation did not grow from the half snapshot
    Drifting,         // deviation grew
    Alarm,            // zero bracket yet clearly infinitely many cyclic
    MismatchedQuery,  // report and estimate answer different questions
};

struct CompareDiagnostics {
    CompareStatus status = CompareStatus::Consistent;
    double ratio = 0.0;       // empirical pi_cyclic / pi_ap
    double midpoint = 0.0;    // bracket midpoint
    double deviation = 0.0;   // |pi_cyclic - mid li(x)| / #(progression primes)
    double deviation_half = 0.0;
    std::string note;  // fixed label: conditional-theory comparison
};

CompareDiagnostics compare(const SurveyReport& rep, const DensityEstimate& est);

// all cyclic primes in (cutoff, x]; the gate must say FinitelyMany
std::vector<i64> verify_finiteness(const CurveModel& m, i64 f, i64 a, i64 x,
                                   i64 cutoff = 100);

// per-prime CSV (schema p,N,a_p,d1,d2,cyclic); needs a detail-mode report
void export_csv(const SurveyReport& rep, const std::string& path);
// summary JSON, schema "cyclix/1"; import restores an equal report
void export_json(const SurveyReport& rep, const std::string& path);
SurveyReport import_json(const std::string& path);

// the exact JSON objects export_json writes, as text, so other surfaces
// (the command line tool) can emit them without a second serializer
std::string report_json_text(const SurveyReport& rep);
std::string density_json_text(const DensityEstimate& est);

// logarithmic integral from 2, adaptive quadrature
double li(double x);

const char* verdict_name(GateVerdict v);
GateVerdict verdict_from_name(const std::string& name);

}  // namespace cyclix
