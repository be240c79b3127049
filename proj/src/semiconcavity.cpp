#include "scx/semiconcavity.hpp"

#include <cmath>

#include "scx/error.hpp"
#include "scx/parallel.hpp"
#include "scx/random.hpp"

namespace scx {

ModulusParams::ModulusParams(double a, double c) : alpha(a), C(c) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw ParameterError("alpha must lie in (0,1]");
    if (!std::isfinite(C)) throw ParameterError("semiconcavity constant must be finite");
}

double modulus_power(double r, double alpha) {
    if (alpha == 1.0) return r * r;
    return std::pow(r, 1.0 + alpha);
}

double defect_unchecked(const FunctionSpec& func, const SemiconcavityTriple& t,
                        const ModulusParams& params) {
    const double lam = t.lambda;
    const Vec mid = lam * t.x + (1.0 - lam) * t.y;
    const double gap = lam * func(t.x) + (1.0 - lam) * func(t.y) - func(mid);
    return gap - params.C * lam * (1.0 - lam) * modulus_power(distance(t.x, t.y), params.alpha);
}

double defect(const FunctionSpec& func, const DomainSpec& domain, const SemiconcavityTriple& t,
              const ModulusParams& params) {
    if (!(t.lambda >= 0.0 && t.lambda <= 1.0)) throw InputError("lambda must lie in [0,1]");
    if (!segment_in_closure(domain, t.x, t.y))
        throw HypothesisError("segment " + to_string(t.x) + " - " + to_string(t.y) +
                              " leaves the closure of " + domain.describe());
    return defect_unchecked(func, t, params);
}

std::vector<SemiconcavityTriple> sample_triples(const DomainSpec& domain, const BallRegion& region,
                                                int n, std::uint64_t seed) {
    if (n < 1) throw InputError("n_triples must be >= 1");
    RegionSampler sampler(domain, region);
    Rng rng(seed);
    std::vector<SemiconcavityTriple> out;
    out.reserve(n);
    const long cap = 100L * n;
    long attempts = 0;
    while (static_cast<int>(out.size()) < n) {
        if (++attempts > cap)
            throw SamplingError("could only sample " + std::to_string(out.size()) + " of " +
                                std::to_string(n) + " admissible triples");
        SemiconcavityTriple t{sampler.draw(rng), sampler.draw(rng), rng.uniform()};
        if (t.lambda <= 0.0) continue;
        if (!segment_in_closure(domain, t.x, t.y)) continue;
        out.push_back(t);
    }
    return out;
}

double estimate_constant(const FunctionSpec& func, const DomainSpec& domain,
                         const BallRegion& region, double alpha, int n_triples,
                         std::uint64_t seed) {
    const ModulusParams zero(alpha, 0.0);
    const auto triples = sample_triples(domain, region, n_triples, seed);
    std::vector<double> ratio(triples.size(), -INFINITY);
    parallel_for(triples.size(), [&](std::size_t i) {
        const auto& t = triples[i];
        const double d = distance(t.x, t.y);
        if (d < 1e-9 || t.lambda <= 0.0 || t.lambda >= 1.0) return;
        const double scale = t.lambda * (1.0 - t.lambda) * modulus_power(d, alpha);
        ratio[i] = defect_unchecked(func, t, zero) / scale;
    });
    double best = -INFINITY;
    for (double r : ratio) best = std::max(best, r);
    if (best == -INFINITY) throw SamplingError("estimate_constant: no valid triple");
    return best;
}

SemiconcavityCertificate certify(const FunctionSpec& func, const DomainSpec& domain,
                                 const BallRegion& region, const ModulusParams& params,
                                 int n_triples, std::uint64_t seed) {
    const auto triples = sample_triples(domain, region, n_triples, seed);
    std::vector<double> defects(triples.size());
    parallel_for(triples.size(), [&](std::size_t i) {
        defects[i] = defect_unchecked(func, triples[i], params);
    });
    SemiconcavityCertificate cert;
    cert.function_id = func.id();
    cert.region = region;
    cert.params = params;
    cert.n_triples = n_triples;
    cert.seed = seed;
    cert.sampler = std::string(kSamplerVersion) + "/" + std::string(kRngName);
    cert.max_defect = -INFINITY;
    for (std::size_t i = 0; i < triples.size(); ++i) {
        cert.max_defect = std::max(cert.max_defect, defects[i]);
        if (defects[i] > 0.0) cert.witnesses.push_back({i, triples[i], defects[i]});
    }
    return cert;
}

nlohmann::json SemiconcavityCertificate::to_json() const {
    nlohmann::json w = nlohmann::json::array();
    for (const auto& d : witnesses)
        w.push_back({{"index", d.index},
                     {"x", scx::to_json(d.triple.x)},
                     {"y", scx::to_json(d.triple.y)},
                     {"lambda", d.triple.lambda},
                     {"defect", d.defect}});
    return {{"function", function_id},
            {"region", scx::to_json(region)},
            {"alpha", params.alpha},
            {"C", params.C},
            {"n_triples", n_triples},
            {"max_defect", max_defect},
            {"passed", passed()},
            {"witnesses", w},
            {"seed", seed},
            {"sampler", sampler}};
}

}  // namespace scx
