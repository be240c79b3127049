#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "scx/funcspace.hpp"
#include "scx/geometry.hpp"

namespace scx {

/// Fractional modulus: exponent alpha in (0,1] and constant C (any sign).
struct ModulusParams {
    double alpha = 1.0;
    double C = 0.0;

    ModulusParams() = default;
    ModulusParams(double a, double c);
};

struct SemiconcavityTriple {
    Vec x;
    Vec y;
    double lambda = 0.5;
};

struct DefectWitness {
    std::size_t index = 0;  ///< position of the triple in the sampled sequence
    SemiconcavityTriple triple;
    double defect = 0.0;
};

struct SemiconcavityCertificate {
    std::string function_id;
    BallRegion region;
    ModulusParams params;
    int n_triples = 0;
    double max_defect = 0.0;
    std::vector<DefectWitness> witnesses;
    std::uint64_t seed = 0;
    std::string sampler;  ///< sampler version and generator name

    bool passed() const { return witnesses.empty(); }
    nlohmann::json to_json() const;
};

/// |v|^(1+alpha), with alpha = 1 computed as a plain square.
double modulus_power(double r, double alpha);

/// lambda u(x) + (1-lambda) u(y) - u(lambda x + (1-lambda) y) - C lambda (1-lambda) |x-y|^(1+alpha).
/// Throws HypothesisError when [x,y] leaves closure(domain).
double defect(const FunctionSpec& func, const DomainSpec& domain, const SemiconcavityTriple& t,
              const ModulusParams& params);

/// Same quantity without the segment check; callers guarantee the hypothesis.
double defect_unchecked(const FunctionSpec& func, const SemiconcavityTriple& t,
                        const ModulusParams& params);

/// Seeded triples with x, y uniform in the region's closure and lambda uniform in (0,1);
/// triples whose segment leaves the closure are redrawn, up to 100 * n attempts.
std::vector<SemiconcavityTriple> sample_triples(const DomainSpec& domain, const BallRegion& region,
                                                int n, std::uint64_t seed);

/// Largest sampled ratio of the midpoint defect to lambda (1-lambda) |x-y|^(1+alpha):
/// a lower bound on the minimal semiconcavity constant.
double estimate_constant(const FunctionSpec& func, const DomainSpec& domain,
                         const BallRegion& region, double alpha, int n_triples, std::uint64_t seed);

SemiconcavityCertificate certify(const FunctionSpec& func, const DomainSpec& domain,
                                 const BallRegion& region, const ModulusParams& params,
                                 int n_triples, std::uint64_t seed);

}  // namespace scx
