#pragma once

// Batch front end: JSON run configs, scalar overrides, mode dispatch, output
// files and exit codes (0 ok, 1 invalid input, 2 non-convergence, 3 broken
// invariant). Every failure leaves an error.json in the output directory.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "kwc/energy.hpp"
#include "kwc/errors.hpp"
#include "kwc/grid.hpp"
#include "kwc/io.hpp"
#include "kwc/model.hpp"
#include "kwc/regnorm.hpp"
#include "kwc/steady1d.hpp"
#include "kwc/steadyradial.hpp"
#include "kwc/stepper.hpp"

namespace kwc::app {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

enum ExitCode : int { Ok = 0, Invalid = 1, NotConverged = 2, InvariantBroken = 3 };

/// Raised when a run finishes but did not reach its stopping criterion.
class NonConvergence : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Config access

/// Applies "a.b.c=value"; value is parsed as JSON when possible, else taken as a string.
inline void applyOverride(Json& cfg, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw ValidationError("--set expects key=value, got '" + assignment + "'");
    const std::string key = assignment.substr(0, eq), raw = assignment.substr(eq + 1);
    Json value;
    try {
        value = Json::parse(raw);
    } catch (const Json::parse_error&) {
        value = raw;
    }
    Json* node = &cfg;
    std::size_t start = 0;
    while (true) {
        const auto dot = key.find('.', start);
        const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (part.empty()) throw ValidationError("--set: empty path component in '" + key + "'");
        if (!node->is_object()) throw ValidationError("--set: '" + key + "' descends into a non-object");
        if (dot == std::string::npos) {
            (*node)[part] = value;
            return;
        }
        node = &(*node)[part];
        if (node->is_null()) *node = Json::object();
        start = dot + 1;
    }
}

/// Typed lookup with defaults and range checks; rejects unknown keys.
class Section {
  public:
    Section(const Json& j, std::string path, const std::set<std::string>& allowed)
        : j_(j.is_null() ? Json::object() : j), path_(std::move(path)) {
        if (!j_.is_object()) throw ValidationError(path_ + " must be an object");
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!allowed.count(it.key())) throw ValidationError("unknown key " + path_ + "." + it.key());
    }

    bool has(const std::string& k) const { return j_.contains(k); }

    double number(const std::string& k, double def) const {
        if (!j_.contains(k)) return def;
        if (!j_[k].is_number()) throw ValidationError(path_ + "." + k + " must be a number");
        return j_[k].get<double>();
    }
    double number(const std::string& k) const {
        if (!j_.contains(k)) throw ValidationError("missing " + path_ + "." + k);
        return number(k, 0.0);
    }
    std::size_t count(const std::string& k, std::size_t def) const {
        if (!j_.contains(k)) return def;
        if (!j_[k].is_number_integer() || j_[k].get<long long>() < 0)
            throw ValidationError(path_ + "." + k + " must be a nonnegative integer");
        return j_[k].get<std::size_t>();
    }
    std::string text(const std::string& k, const std::string& def) const {
        if (!j_.contains(k)) return def;
        if (!j_[k].is_string()) throw ValidationError(path_ + "." + k + " must be a string");
        return j_[k].get<std::string>();
    }
    bool flag(const std::string& k, bool def) const {
        if (!j_.contains(k)) return def;
        if (!j_[k].is_boolean()) throw ValidationError(path_ + "." + k + " must be true or false");
        return j_[k].get<bool>();
    }
    std::vector<double> numbers(const std::string& k) const {
        std::vector<double> out;
        if (!j_.contains(k)) return out;
        if (!j_[k].is_array()) throw ValidationError(path_ + "." + k + " must be an array of numbers");
        for (const auto& v : j_[k]) {
            if (!v.is_number()) throw ValidationError(path_ + "." + k + " must be an array of numbers");
            out.push_back(v.get<double>());
        }
        return out;
    }
    const Json& raw(const std::string& k) const { return j_.contains(k) ? j_[k] : empty(); }

  private:
    static const Json& empty() {
        static const Json e = Json::object();
        return e;
    }
    Json j_;
    std::string path_;
};

inline regnorm::Kind parseNormKind(const std::string& s) {
    try {
        return regnorm::kindFromString(s);
    } catch (const std::exception&) {
        throw ValidationError("unknown norm kind '" + s + "' (hyperbola, yosida, tanh, arctan)");
    }
}

struct StepperSettings {
    StepConfig cfg;
    std::size_t n = 129;
};

inline StepperSettings parseStepper(const Json& root) {
    Section s(root.contains("stepper") ? root["stepper"] : Json(),
              "stepper", {"h", "nu", "norm", "n", "maxSteps", "steadyTolerance", "newtonTol", "newtonMaxIter", "snapshotEvery"});
    StepperSettings out;
    out.cfg.h = s.number("h", 0.1);
    const double nu = s.number("nu", 0.05);
    if (!(nu > 0.0 && nu < 1.0)) throw ValidationError("stepper.nu must lie in (0, 1)");
    out.cfg.norm = regnorm::RegularizedNorm(parseNormKind(s.text("norm", "hyperbola")), nu);
    out.n = s.count("n", 129);
    if (out.n < 3) throw ValidationError("stepper.n must be at least 3");
    out.cfg.maxSteps = s.count("maxSteps", 5000);
    out.cfg.steadyTolerance = s.number("steadyTolerance", 1e-6);
    out.cfg.newtonTol = s.number("newtonTol", 1e-10);
    out.cfg.newtonMaxIter = s.count("newtonMaxIter", 1000);
    out.cfg.snapshotEvery = s.count("snapshotEvery", 0);
    out.cfg.validate();
    return out;
}

inline MaterialLaws parseLaws(const Json& root, double defaultDelta0) {
    Section s(root.contains("laws") ? root["laws"] : Json(), "laws", {"delta0"});
    MaterialLaws laws{s.number("delta0", defaultDelta0)};
    laws.validate();
    return laws;
}

inline Domain1D parseDomain1D(const Json& root) {
    Section s(root.contains("domain") ? root["domain"] : Json(), "domain", {"gammaLeft", "gammaRight"});
    Domain1D d{1.0, s.number("gammaLeft", 0.0), s.number("gammaRight", 1.0)};
    d.validate();
    return d;
}

inline DomainRadial parseDomainRadial(const Json& root) {
    Section s(root.contains("domain") ? root["domain"] : Json(), "domain", {"r0", "R", "gammaInner", "gammaOuter"});
    DomainRadial d{s.number("r0", 1.0), s.number("R", 2.0), s.number("gammaInner", 0.0), s.number("gammaOuter", 1.0)};
    d.validate();
    if (d.r0 < bessel::kMinX || d.R > bessel::kMaxX)
        throw ValidationError("domain radii must lie in [1e-3, 50]");
    return d;
}

// ---------------------------------------------------------------------------
// Run context

struct Context {
    Json config;
    fs::path outDir;
    io::Provenance prov;
    unsigned jobs = 1;
    bool plots = true;
    std::ostream* log = &std::cerr;
};

/// Runs fn(i) for i in [0, count) on up to `jobs` threads; results must be
/// written to per-index slots so the output order does not depend on scheduling.
template <class Fn> void parallelFor(std::size_t count, unsigned jobs, Fn&& fn) {
    jobs = std::max(1u, std::min<unsigned>(jobs, unsigned(std::max<std::size_t>(count, 1))));
    if (jobs == 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::exception_ptr> errors(jobs);
    {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < jobs; ++t)
            pool.emplace_back([&, t] {
                try {
                    for (std::size_t i = t; i < count; i += jobs) fn(i);
                } catch (...) {
                    errors[t] = std::current_exception();
                }
            });
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

// ---------------------------------------------------------------------------
// Simulation modes

inline State initialState(const Json& root, const GridPtr& grid, const Domain& domain, std::uint64_t seed) {
    Section s(root.contains("init") ? root["init"] : Json(), "init", {"kind", "eta"});
    const std::string kind = s.text("kind", "random");
    const auto bv = boundaryValues(domain);
    const auto hm = harmonicExtension(domain, grid);
    State st{ScalarField(grid), ScalarField(grid), 0.0};
    if (kind == "random") {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        const double lo = std::min(bv.lo, bv.hi), hi = std::max(bv.lo, bv.hi);
        for (std::size_t j = 0; j < grid->size(); ++j) {
            st.eta[j] = unit(rng);
            st.theta[j] = lo + (hi - lo) * unit(rng);
        }
    } else if (kind == "harmonic") {
        const double e = s.number("eta", 1.0);
        for (std::size_t j = 0; j < grid->size(); ++j) {
            st.eta[j] = e;
            st.theta[j] = hm[j];
        }
    } else if (kind == "step") {
        // theta jumps from gamma_lo to gamma_hi at the middle of the domain
        const double e = s.number("eta", 1.0);
        for (std::size_t j = 0; j < grid->size(); ++j) {
            st.eta[j] = e;
            st.theta[j] = 2 * j < grid->size() ? bv.lo : bv.hi;
        }
    } else {
        throw ValidationError("init.kind must be random, harmonic or step");
    }
    st.theta[0] = bv.lo;
    st.theta.values.back() = bv.hi;
    return st;
}

inline void writeFieldCsv(const fs::path& path, const io::Provenance& prov, const ScalarField& eta,
                          const ScalarField& theta, const char* coord) {
    io::CsvWriter csv(path, prov, {coord, "eta", "theta"});
    for (std::size_t j = 0; j < eta.size(); ++j) csv.row({eta.grid->node(j), eta[j], theta[j]});
    csv.close();
}

inline int runSimulation(Context& ctx, bool radialMode) {
    const Json& root = ctx.config;
    const auto st = parseStepper(root);
    const MaterialLaws laws = parseLaws(root, 1e-3);
    Domain domain = radialMode ? Domain{parseDomainRadial(root)} : Domain{parseDomain1D(root)};
    const auto grid = Grid::forDomain(domain, st.n);
    const std::uint64_t seed = root.value("seed", std::uint64_t{0});
    Stepper stepper(st.cfg, laws, domain, grid);
    const State init = initialState(root, grid, domain, seed);
    const auto rec = stepper.runToOmegaLimit(init);
    for (const auto& note : rec.projectionNotes) *ctx.log << "warning: initial data projected: " << note << '\n';

    const char* coord = radialMode ? "r" : "x";
    {
        io::CsvWriter csv(ctx.outDir / "energy.csv", ctx.prov,
                          {"t", "dirichlet", "potential", "weightedTV", "boundaryPenalty", "nuTerm", "sharpTotal",
                           "relaxedTotal", "stepNormEta", "stepNormTheta"});
        for (std::size_t i = 1; i < rec.energyReports.size(); ++i) {
            const auto& e = rec.energyReports[i];
            csv.row({rec.stepTimes[i], e.dirichlet, e.potential, e.weightedTV, e.boundaryPenalty, e.nuTerm,
                     e.sharpTotal, *e.relaxedTotal, rec.stepNorms[i - 1].eta, rec.stepNorms[i - 1].theta});
        }
        csv.close();
    }
    for (std::size_t k = 0; k < rec.times.size(); ++k) {
        std::ostringstream name;
        name << "snapshot_" << std::setw(5) << std::setfill('0') << k << ".csv";
        writeFieldCsv(ctx.outDir / name.str(), ctx.prov, rec.etaSnapshots[k], rec.thetaSnapshots[k], coord);
    }
    writeFieldCsv(ctx.outDir / "final.csv", ctx.prov, rec.finalState.eta, rec.finalState.theta, coord);
    Json summary = {{"mode", radialMode ? "simulateRadial" : "simulate1d"},
                    {"converged", rec.converged},
                    {"steps", rec.steps()},
                    {"finalTime", rec.finalState.t},
                    {"initialRelaxedEnergy", *rec.energyReports.front().relaxedTotal},
                    {"finalRelaxedEnergy", *rec.energyReports.back().relaxedTotal},
                    {"weightedSumSlack", rec.steps() ? weightedSumSlack(rec, st.cfg.h) : 0.0},
                    {"residuals",
                     {{"s1Weak", rec.residuals.s1Weak},
                      {"s1Strong", rec.residuals.s1Strong},
                      {"minimalityGap", rec.residuals.minimalityGap}}},
                    {"snapshotTimes", rec.times},
                    {"projectionNotes", rec.projectionNotes}};
    io::writeJson(ctx.outDir / "summary.json", ctx.prov, summary);
    if (ctx.plots) {
        io::Series sharp{"sharp", {}, {}}, relaxed{"relaxed", {}, {}};
        for (std::size_t i = 0; i < rec.energyReports.size(); ++i) {
            sharp.x.push_back(rec.stepTimes[i]);
            sharp.y.push_back(rec.energyReports[i].sharpTotal);
            relaxed.x.push_back(rec.stepTimes[i]);
            relaxed.y.push_back(*rec.energyReports[i].relaxedTotal);
        }
        io::emitSvgLinePlot({sharp, relaxed}, ctx.outDir / "energy.svg", "energy");
        io::Series eta{"eta", {}, {}}, theta{"theta", {}, {}};
        for (std::size_t j = 0; j < grid->size(); ++j) {
            eta.x.push_back(grid->node(j));
            eta.y.push_back(rec.finalState.eta[j]);
            theta.x.push_back(grid->node(j));
            theta.y.push_back(rec.finalState.theta[j]);
        }
        io::emitSvgLinePlot({eta, theta}, ctx.outDir / "final.svg", "final state");
    }
    if (!rec.converged)
        throw NonConvergence("no steady state within " + std::to_string(st.cfg.maxSteps) + " steps");
    return Ok;
}

// ---------------------------------------------------------------------------
// Steady-state modes

inline int runSteady1D(Context& ctx) {
    Section s(ctx.config.contains("steady1d") ? ctx.config["steady1d"] : Json(), "steady1d",
              {"gammaRight", "intervals", "n"});
    const MaterialLaws laws = parseLaws(ctx.config, 0.0);
    const double gammaRight = s.number("gammaRight", 1.0);
    if (!(gammaRight > 0.0)) throw ValidationError("steady1d.gammaRight must be > 0");
    steady1d::JumpSet1D js;
    const Json& ivs = s.raw("intervals");
    if (!ivs.is_null() && !ivs.is_array()) throw ValidationError("steady1d.intervals must be an array");
    for (std::size_t k = 0; ivs.is_array() && k < ivs.size(); ++k) {
        Section iv(ivs[k], "steady1d.intervals[" + std::to_string(k) + "]", {"a", "b", "left", "right"});
        auto contact = [&](const std::string& key) {
            const std::string v = iv.text(key, "mismatch");
            if (v == "mismatch") return steady1d::Contact::Mismatch;
            if (v == "reflecting") return steady1d::Contact::Reflecting;
            throw ValidationError("interval contact must be mismatch or reflecting");
        };
        js.intervals.push_back({iv.number("a"), iv.number("b"), contact("left"), contact("right")});
    }
    const auto state = steady1d::buildSteadyState(js, gammaRight, laws);
    const std::size_t n = s.count("n", 2049);
    const auto grid = Grid::interval(n);
    steady1d::writeSteadyCsv(state, *grid, ctx.outDir / "steady1d.csv", ctx.prov);
    Json out = steady1d::toJson(state);
    const auto rep = steady1d::verifyEulerLagrange(state, *grid);
    out["eulerLagrange"] = {{"interior", rep.interior}, {"jump", rep.jump}, {"boundary", rep.boundary},
                            {"hx", rep.hx}, {"constant", rep.constant}};
    out["budgetResidual"] = steady1d::budgetResidual(js, gammaRight, state.d);
    io::writeJson(ctx.outDir / "steady1d.json", ctx.prov, out);
    if (ctx.plots) {
        io::Series eta{"eta", {}, {}}, w{"w", {}, {}};
        for (std::size_t j = 0; j < n; ++j) {
            eta.x.push_back(grid->node(j));
            eta.y.push_back(state.eta(grid->node(j)));
            w.x.push_back(grid->node(j));
            w.y.push_back(state.w(grid->node(j)));
        }
        io::emitSvgLinePlot({eta, w}, ctx.outDir / "steady1d.svg", "1D steady state");
    }
    return Ok;
}

inline int runSteadyRadial(Context& ctx) {
    Section s(ctx.config.contains("steadyRadial") ? ctx.config["steadyRadial"] : Json(), "steadyRadial",
              {"jumpRadii", "thetaLevels", "samples"});
    radial::RadialConfig rc;
    rc.domain = parseDomainRadial(ctx.config);
    rc.laws = parseLaws(ctx.config, 0.0);
    rc.jumpRadii = s.numbers("jumpRadii");
    rc.thetaLevels = s.numbers("thetaLevels");
    const auto st = radial::solveBands(rc);
    const std::size_t samples = s.count("samples", 1001);
    if (samples < 2) throw ValidationError("steadyRadial.samples must be at least 2");
    Json out = {{"found", st.found}, {"admissible", st.admissible}, {"message", st.message}};
    if (st.found) {
        io::CsvWriter csv(ctx.outDir / "steady_radial.csv", ctx.prov, {"r", "eta", "theta", "w"});
        for (std::size_t i = 0; i < samples; ++i) {
            const double r = rc.domain.r0 + (rc.domain.R - rc.domain.r0) * double(i) / double(samples - 1);
            csv.row({r, st.eta(r), st.theta(r), st.w(r)});
        }
        csv.close();
        Json bands = Json::array(), jumps = Json::array();
        for (const auto& b : st.bands)
            bands.push_back({{"lo", b.lo}, {"hi", b.hi}, {"A", b.A / b.i0hi}, {"B", b.B / b.k0lo}, {"theta", b.level}});
        for (const auto& j : st.jumps) jumps.push_back({{"radius", j.radius}, {"height", j.height}, {"eta", j.eta}});
        out["bands"] = bands;
        out["jumps"] = jumps;
        out["fluxConstant"] = st.fluxConstant;
    }
    Json report = Json::object();
    for (const auto& [k, v] : st.conditionReport) report[k] = v;
    out["conditionReport"] = report;
    io::writeJson(ctx.outDir / "steady_radial.json", ctx.prov, out);
    return Ok;
}

// ---------------------------------------------------------------------------
// Figure scans

inline int runFigure1(Context& ctx) {
    Section s(ctx.config.contains("scan") ? ctx.config["scan"] : Json(), "scan", {"r0", "gammas", "Rmax", "samples"});
    const double r0 = s.number("r0", 1.0);
    std::vector<double> gammas = s.numbers("gammas");
    if (gammas.empty()) gammas = {0.8, 0.9, 1.0, 2.0, 3.0};
    const double Rmax = s.number("Rmax", 20.0);
    const std::size_t samples = s.count("samples", 1000);
    if (!(r0 > 0 && Rmax > r0 && Rmax <= bessel::kMaxX)) throw ValidationError("scan: need 0 < r0 < Rmax <= 50");
    if (samples < 2) throw ValidationError("scan.samples must be at least 2");
    std::vector<std::vector<double>> values(gammas.size());
    std::vector<Json> rstar(gammas.size());
    parallelFor(gammas.size(), ctx.jobs, [&](std::size_t k) {
        const double g = gammas[k];
        values[k].resize(samples);
        for (std::size_t i = 0; i < samples; ++i) {
            const double R = r0 + (Rmax - r0) * double(i + 1) / double(samples);
            values[k][i] = radial::outerJumpF(r0, R, g);
        }
        const auto res = radial::findRStar(r0, g);
        const int crit = radial::outerJumpCriticalPoints(r0, g, Rmax);
        Json j = {{"gamma", g}, {"criticalPoints", crit}};
        if (res) {
            j["lower"] = res->lower;
            j["upper"] = res->upper;
            j["bounded"] = res->bounded;
            j["regime"] = res->lower == r0 ? "unique-interval" : "two-crossings";
        } else {
            j["regime"] = "no-solution";
        }
        rstar[k] = j;
    });
    io::CsvWriter csv(ctx.outDir / "fig1_scan.csv", ctx.prov, {"gamma", "R", "f"});
    for (std::size_t k = 0; k < gammas.size(); ++k)
        for (std::size_t i = 0; i < samples; ++i)
            csv.row({gammas[k], r0 + (Rmax - r0) * double(i + 1) / double(samples), values[k][i]});
    csv.close();
    io::writeJson(ctx.outDir / "fig1_thresholds.json", ctx.prov, {{"r0", r0}, {"Rstar", rstar}});
    if (ctx.plots) {
        std::vector<io::Series> series;
        for (std::size_t k = 0; k < gammas.size(); ++k) {
            io::Series sr{"gamma=" + io::formatNumber(gammas[k]), {}, {}};
            for (std::size_t i = 0; i < samples; ++i) {
                sr.x.push_back(r0 + (Rmax - r0) * double(i + 1) / double(samples));
                sr.y.push_back(values[k][i]);
            }
            series.push_back(std::move(sr));
        }
        io::emitSvgLinePlot(series, ctx.outDir / "fig1_scan.svg", "f(r0, R)");
    }
    return Ok;
}

inline int runFigure2(Context& ctx) {
    Section s(ctx.config.contains("scan") ? ctx.config["scan"] : Json(), "scan",
              {"r0", "gamma", "r1Min", "r1Max", "RMin", "RMax", "nr1", "nR"});
    const double r0 = s.number("r0", 1.0), gamma = s.number("gamma", 2.0);
    const double r1Min = s.number("r1Min", r0 * 1.01), r1Max = s.number("r1Max", 20.0);
    const double RMin = s.number("RMin", r0 * 1.01), RMax = s.number("RMax", 20.0);
    const std::size_t nr1 = s.count("nr1", 100), nR = s.count("nR", 100);
    if (nr1 < 2 || nR < 2) throw ValidationError("scan grid needs at least 2 points per axis");
    if (!(r0 > 0 && r1Min > r0 && r1Max > r1Min && RMax > RMin && RMax <= bessel::kMaxX))
        throw ValidationError("scan: need r0 < r1Min < r1Max and RMin < RMax <= 50");
    std::vector<std::vector<radial::ContourCell>> rows(nr1);
    parallelFor(nr1, ctx.jobs, [&](std::size_t i) {
        const double r1 = r1Min + (r1Max - r1Min) * double(i) / double(nr1 - 1);
        rows[i] = radial::scanInteriorJumpContour(r0, gamma, r1, r1, RMin, RMax, 2, int(nR));
        rows[i].resize(nR); // the two-point r1 axis duplicates the row
    });
    io::CsvWriter csv(ctx.outDir / "fig2_contour.csv", ctx.prov, {"r1", "R", "G", "wAtR0", "blue", "gray"});
    std::size_t blue = 0;
    for (const auto& row : rows)
        for (const auto& c : row) {
            csv.row({c.r1, c.R, c.G, c.wAtR0, c.blue ? 1.0 : 0.0, c.gray ? 1.0 : 0.0});
            blue += c.blue;
        }
    csv.close();
    io::CsvWriter suff(ctx.outDir / "fig2_sufficient.csv", ctx.prov, {"r1", "value", "holds"});
    double lo = INFINITY, hi = -INFINITY;
    for (std::size_t i = 0; i < nr1; ++i) {
        const double r1 = r1Min + (r1Max - r1Min) * double(i) / double(nr1 - 1);
        const double v = radial::interiorJumpSufficient(r0, r1, gamma);
        suff.row({r1, v, v >= 0 ? 1.0 : 0.0});
        if (v >= 0) lo = std::min(lo, r1), hi = std::max(hi, r1);
    }
    suff.close();
    Json summary = {{"r0", r0}, {"gamma", gamma}, {"blueCells", blue}, {"cells", nr1 * nR}};
    if (lo <= hi) summary["sufficientRange"] = {lo, hi};
    else summary["sufficientRange"] = nullptr;
    io::writeJson(ctx.outDir / "fig2_summary.json", ctx.prov, summary);
    return Ok;
}

inline int runFigure34(Context& ctx, int figure) {
    const double dr0 = figure == 3 ? 0.5 : 1.0, dr1 = figure == 3 ? 1.0 : 2.5;
    Section s(ctx.config.contains("scan") ? ctx.config["scan"] : Json(), "scan",
              {"r0", "r1", "r2", "R", "gammaMin", "gammaMax", "gammaStep"});
    const double r0 = s.number("r0", dr0), r1 = s.number("r1", dr1), r2 = s.number("r2", 9.0), R = s.number("R", 10.0);
    const double gMin = s.number("gammaMin", 0.0), gMax = s.number("gammaMax", 10.0), gStep = s.number("gammaStep", 0.05);
    if (!(gStep > 0 && gMax > gMin)) throw ValidationError("scan: need gammaMin < gammaMax and gammaStep > 0");
    if (!(r0 > 0 && r0 <= r1 && r1 < r2 && r2 <= R && R <= bessel::kMaxX))
        throw ValidationError("scan: need 0 < r0 <= r1 < r2 <= R <= 50");
    const std::size_t count = std::size_t(std::floor((gMax - gMin) / gStep + 1e-9)) + 1;
    std::vector<radial::TwoJumpReport> reps(count);
    parallelFor(count, ctx.jobs, [&](std::size_t i) { reps[i] = radial::twoJumpSystem(r0, r1, r2, R, gMin + gStep * double(i)); });
    const std::string stem = "fig" + std::to_string(figure);
    io::CsvWriter csv(ctx.outDir / (stem + "_scan.csv"), ctx.prov,
                      {"gamma", "d1", "d1bar", "condition2", "wAtR0", "condition3"});
    for (std::size_t i = 0; i < count; ++i) {
        const auto& r = reps[i];
        csv.row({gMin + gStep * double(i), r.d1Raw, r.d1bar, r.d1 ? 1.0 : 0.0, r.wAtR0 ? *r.wAtR0 : NAN,
                 r.condition3 ? 1.0 : 0.0});
    }
    csv.close();
    auto opt = [](const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); };
    const auto t2 = radial::thresholdCondition2(r0, r1, r2, R, gMax);
    const auto t3 = radial::thresholdCondition3(r0, r1, r2, R, gMax);
    Json th = {{"radii", {r0, r1, r2, R}}};
    if (figure == 3) {
        th["rho1"] = opt(t2);
    } else {
        th["rho2"] = opt(t2);
        th["rho3"] = opt(t3);
    }
    th["condition2Threshold"] = opt(t2);
    th["condition3Threshold"] = opt(t3);
    io::writeJson(ctx.outDir / (stem + "_thresholds.json"), ctx.prov, th);
    if (ctx.plots) {
        io::Series d1{"d1", {}, {}}, d1bar{"d1bar", {}, {}}, w{"w(r0)", {}, {}};
        for (std::size_t i = 0; i < count; ++i) {
            const double g = gMin + gStep * double(i);
            d1.x.push_back(g);
            d1.y.push_back(reps[i].d1Raw);
            d1bar.x.push_back(g);
            d1bar.y.push_back(reps[i].d1bar);
            w.x.push_back(g);
            w.y.push_back(reps[i].wAtR0 ? *reps[i].wAtR0 : NAN);
        }
        io::emitSvgLinePlot({d1, d1bar, w}, ctx.outDir / (stem + "_scan.svg"), "two-jump conditions");
    }
    return Ok;
}

// ---------------------------------------------------------------------------
// Entry point

inline std::string configHash(const Json& cfg) { return io::hex64(io::fnv1a(cfg.dump())); }

inline void writeError(const fs::path& dir, const io::Provenance& prov, int code, const std::string& kind,
                       const std::string& message) {
    try {
        io::writeJson(dir / "error.json", prov, {{"exitCode", code}, {"kind", kind}, {"message", message}});
    } catch (...) {
        // reporting must not mask the original failure
    }
}

struct Invocation {
    std::string configPath;
    std::vector<std::string> overrides;
    std::string outDir;
    unsigned jobs = 1;
};

/// Runs one configured job. The config must already be loaded into ctx.
inline int dispatch(Context& ctx) {
    const Json& root = ctx.config;
    static const std::set<std::string> top{"mode", "output", "seed", "plots", "laws", "domain", "stepper",
                                           "init", "steady1d", "steadyRadial", "scan"};
    for (auto it = root.begin(); it != root.end(); ++it)
        if (!top.count(it.key())) throw ValidationError("unknown top-level key " + it.key());
    if (root.contains("seed") && !root["seed"].is_number_unsigned()) throw ValidationError("seed must be a nonnegative integer");
    const std::string mode = root.value("mode", std::string());
    if (mode == "simulate1d") return runSimulation(ctx, false);
    if (mode == "simulateRadial") return runSimulation(ctx, true);
    if (mode == "steady1d") return runSteady1D(ctx);
    if (mode == "steadyRadial") return runSteadyRadial(ctx);
    if (mode == "scanFigure1") return runFigure1(ctx);
    if (mode == "scanFigure2") return runFigure2(ctx);
    if (mode == "scanFigure3") return runFigure34(ctx, 3);
    if (mode == "scanFigure4") return runFigure34(ctx, 4);
    throw ValidationError("mode must be one of simulate1d, simulateRadial, steady1d, steadyRadial, "
                          "scanFigure1..scanFigure4 (got '" + mode + "')");
}

/// Loads, overrides, runs, and maps failures to exit codes.
inline int run(const Invocation& inv, std::ostream& log = std::cerr) {
    Context ctx;
    ctx.log = &log;
    ctx.jobs = std::max(1u, inv.jobs);
    fs::path outDir = inv.outDir.empty() ? fs::path("out") : fs::path(inv.outDir);
    auto fail = [&](int code, const std::string& kind, const std::string& msg) {
        log << "error (" << kind << "): " << msg << '\n';
        writeError(outDir, ctx.prov, code, kind, msg);
        return code;
    };
    try {
        std::ifstream in(inv.configPath);
        if (!in) throw ValidationError("cannot read config '" + inv.configPath + "'");
        Json cfg;
        try {
            cfg = Json::parse(in);
        } catch (const Json::parse_error& e) {
            throw ValidationError(std::string("config is not valid JSON: ") + e.what());
        }
        if (!cfg.is_object()) throw ValidationError("config must be a JSON object");
        for (const auto& o : inv.overrides) applyOverride(cfg, o);
        if (inv.outDir.empty() && cfg.contains("output")) {
            if (!cfg["output"].is_string()) throw ValidationError("output must be a string");
            outDir = cfg["output"].get<std::string>();
        }
        if (cfg.contains("plots") && !cfg["plots"].is_boolean()) throw ValidationError("plots must be true or false");
        ctx.plots = cfg.value("plots", true);
        ctx.prov.configHash = configHash(cfg);
        ctx.config = std::move(cfg);
        ctx.outDir = outDir;
        fs::create_directories(outDir);
        std::error_code ec;
        fs::remove(outDir / "error.json", ec);
        return dispatch(ctx);
    } catch (const NonConvergence& e) {
        return fail(NotConverged, "non-convergence", e.what());
    } catch (const SolverError& e) {
        return fail(NotConverged, "solver", e.what());
    } catch (const SchemeError& e) {
        return fail(InvariantBroken, "invariant", e.what());
    } catch (const ValidationError& e) {
        return fail(Invalid, "validation", e.what());
    } catch (const RangeError& e) {
        return fail(Invalid, "range", e.what());
    } catch (const Json::exception& e) {
        return fail(Invalid, "validation", e.what());
    } catch (const IoError& e) {
        return fail(Invalid, "io", e.what());
    } catch (const fs::filesystem_error& e) {
        return fail(Invalid, "io", e.what());
    }
}

} // namespace kwc::app
