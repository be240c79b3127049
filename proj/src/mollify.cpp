#include <algorithm>
#include <cmath>

#include "scx/error.hpp"
#include "scx/extension.hpp"

namespace scx {

MollifierQuadrature MollifierQuadrature::make(int dim, int m_q) {
    if (dim < 1 || dim > kMaxDim) throw InputError("mollifier: dimension must be 1, 2 or 3");
    if (m_q < 1) throw ParameterError("mollifier: m_q must be >= 1");
    MollifierQuadrature q;
    q.dim = dim;
    q.m_q = m_q;
    std::vector<int> idx(dim, 0);
    for (;;) {
        Vec y(dim);
        // Integer numerators keep the grid exactly symmetric under y -> -y.
        for (int k = 0; k < dim; ++k) y[k] = static_cast<double>(2 * idx[k] + 1 - m_q) / m_q;
        const double w = bump(norm(y));
        if (w > 0.0) {
            q.nodes.push_back(y);
            q.weights.push_back(w);
        }
        int a = dim - 1;
        while (a >= 0 && ++idx[a] == m_q) idx[a--] = 0;
        if (a < 0) break;
    }
    double sum = 0.0;
    for (double w : q.weights) sum += w;
    for (double& w : q.weights) w /= sum;
    // Push the leftover rounding into the heaviest weight so the ordered sum is 1.
    const auto heaviest = std::max_element(q.weights.begin(), q.weights.end()) - q.weights.begin();
    for (int pass = 0; pass < 2; ++pass) {
        double s = 0.0;
        for (double w : q.weights) s += w;
        q.weights[heaviest] += 1.0 - s;
    }
    return q;
}

MollifiedApproximant::MollifiedApproximant(std::shared_ptr<const ScalarField> base, BallRegion ball,
                                           int h, int m_q)
    : base_(std::move(base)), ball_(std::move(ball)), h_(h) {
    if (!base_) throw InputError("mollifier: null base field");
    if (base_->dim() != ball_.dim()) throw InputError("mollifier: dimension mismatch");
    if (!(h_ > 2.0 / ball_.radius))
        throw ParameterError("mollifier: h = " + std::to_string(h_) + " must exceed 2/delta");
    quad_ = MollifierQuadrature::make(ball_.dim(), m_q);
}

double MollifiedApproximant::value(const Vec& x) const {
    if (x.dim() != dim()) throw InputError("mollifier: dimension mismatch");
    if (distance(x, ball_.center) > 0.5 * ball_.radius * (1.0 + 1e-12))
        throw InputError("mollifier: " + to_string(x) + " lies outside B_{delta/2}");
    std::vector<Vec> pts(quad_.nodes.size());
    for (std::size_t j = 0; j < pts.size(); ++j) {
        pts[j] = x + quad_.nodes[j] / static_cast<double>(h_);
        if (!ball_.contains_closed(pts[j]))
            throw EvaluationError("mollifier: quadrature node escapes the ball (internal)");
    }
    std::vector<double> vals(pts.size());
    base_->values(pts, vals);
    double acc = 0.0;
    for (std::size_t j = 0; j < vals.size(); ++j) acc += quad_.weights[j] * vals[j];
    return acc;
}

nlohmann::json MollifiedApproximant::descriptor() const {
    return {{"id", "mollified"}, {"h", h_}, {"m_q", quad_.m_q}, {"ball", scx::to_json(ball_)},
            {"base", base_->descriptor()}};
}

bool summand_differentiability_probe(std::span<const FunctionSpec> fields, const DomainSpec& domain,
                                     const Vec& x, double h_fd, double eps_c) {
    if (fields.empty()) throw InputError("summand probe: no fields");
    std::vector<FunctionSpec> copy(fields.begin(), fields.end());
    const FunctionSpec sum = FunctionSpec::from_callable("sum", fields[0].dim(), [copy](const Vec& y) {
        double s = 0.0;
        for (const auto& f : copy) s += f(y);
        return s;
    });
    if (!passes_differentiability_filter(probe_stencil(sum, domain, x, h_fd), eps_c)) return true;
    for (const auto& f : fields)
        if (!passes_differentiability_filter(probe_stencil(f, domain, x, h_fd), eps_c)) return false;
    return true;
}

}  // namespace scx
