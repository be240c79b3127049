#include <algorithm>
#include <cmath>
#include <limits>

#include "scx/error.hpp"
#include "scx/extension.hpp"

namespace scx {

double bump(double r) {
    if (!(r < 1.0)) return 0.0;
    return std::exp(1.0 / (r * r - 1.0));
}

double smooth_step(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    const double a = std::exp(-1.0 / t);
    const double b = std::exp(-1.0 / (1.0 - t));
    return a / (a + b);
}

PartitionOfUnity::PartitionOfUnity(DomainSpec domain, std::vector<BallRegion> cover, double eta)
    : domain_(std::move(domain)), cover_(std::move(cover)), eta_(eta) {
    for (const auto& b : cover_) {
        if (b.dim() != domain_.dim()) throw InputError("partition: cover/domain dimension mismatch");
        if (!(b.radius > 0.0)) throw InputError("partition: cover radius must be positive");
    }
    if (eta_ <= 0.0) {
        double rmin = std::numeric_limits<double>::infinity();
        for (const auto& b : cover_) rmin = std::min(rmin, b.radius);
        eta_ = cover_.empty() ? 0.0 : 0.5 * rmin;
    }
}

std::vector<double> PartitionOfUnity::raw(const Vec& y) const {
    std::vector<double> b(size(), 0.0);
    for (std::size_t j = 0; j < cover_.size(); ++j) b[j] = bump(distance(y, cover_[j].center) / cover_[j].radius);
    const double depth = -domain_.level(y);
    if (cover_.empty())
        b.back() = depth > 0.0 ? 1.0 : 0.0;
    else
        b.back() = smooth_step(depth / eta_);
    return b;
}

std::vector<double> PartitionOfUnity::weights(const Vec& y) const {
    std::vector<double> w = raw(y);
    double sum = 0.0;
    for (double v : w) sum += v;
    if (!(sum > 0.0)) throw PartitionError("partition: no element covers " + to_string(y));
    for (double& v : w) v /= sum;
    return w;
}

bool PartitionOfUnity::in_element(std::size_t j, const Vec& y) const {
    if (j < cover_.size()) return distance(y, cover_[j].center) < cover_[j].radius;
    return domain_.contains(y, Where::Open);
}

bool PartitionOfUnity::in_union(const Vec& y) const {
    for (std::size_t j = 0; j < size(); ++j)
        if (in_element(j, y)) return true;
    return false;
}

void PartitionOfUnity::validate(std::span<const Vec> probes, double tol) const {
    for (const Vec& y : probes) {
        const auto w = weights(y);
        double sum = 0.0;
        for (double v : w) sum += v;
        if (std::abs(sum - 1.0) > tol)
            throw PartitionError("partition: weights sum to " + std::to_string(sum) + " at " + to_string(y));
    }
}

nlohmann::json PartitionOfUnity::to_json() const {
    nlohmann::json c = nlohmann::json::array();
    for (const auto& b : cover_) c.push_back(scx::to_json(b));
    return {{"domain", domain_.to_json()}, {"cover", c}, {"eta", eta_}};
}

std::vector<Vec> union_probe_grid(const PartitionOfUnity& partition, int n) {
    if (n < 1) throw InputError("union_probe_grid: n must be >= 1");
    const DomainSpec& dom = partition.domain();
    const int d = dom.dim();
    Vec lo(d), hi(d);
    bool any = false;
    auto include = [&](const Vec& a, const Vec& b) {
        for (int k = 0; k < d; ++k) {
            lo[k] = any ? std::min(lo[k], a[k]) : a[k];
            hi[k] = any ? std::max(hi[k], b[k]) : b[k];
        }
        any = true;
    };
    for (const auto& b : partition.cover()) {
        Vec r(d);
        for (int k = 0; k < d; ++k) r[k] = b.radius;
        include(b.center - r, b.center + r);
    }
    switch (dom.kind()) {
        case DomainKind::Box:
            include(dom.lo(), dom.hi());
            break;
        case DomainKind::Ball:
        case DomainKind::CappedBall: {
            Vec r(d);
            for (int k = 0; k < d; ++k) r[k] = dom.radius();
            include(dom.center() - r, dom.center() + r);
            break;
        }
        case DomainKind::HalfSpace:
            break;
    }
    if (!any) throw GeometryError("union_probe_grid: unbounded union");

    for (int m = std::max(2, static_cast<int>(std::ceil(std::pow(n, 1.0 / d))));; m = m + m / 4 + 1) {
        std::vector<Vec> out;
        std::vector<int> idx(d, 0);
        for (;;) {
            Vec y(d);
            for (int k = 0; k < d; ++k) y[k] = lo[k] + (idx[k] + 0.5) * (hi[k] - lo[k]) / m;
            if (partition.in_union(y)) out.push_back(y);
            int a = d - 1;
            while (a >= 0 && ++idx[a] == m) idx[a--] = 0;
            if (a < 0) break;
        }
        if (static_cast<int>(out.size()) >= n || m > 4096) return out;
    }
}

GlobalExtension::GlobalExtension(FunctionSpec u, PartitionOfUnity partition,
                                 std::vector<std::shared_ptr<const ScalarField>> local)
    : u_(std::move(u)), partition_(std::move(partition)), local_(std::move(local)) {
    if (local_.size() != partition_.cover().size())
        throw InputError("glue: one local field per cover ball is required");
    for (const auto& f : local_)
        if (!f || f->dim() != u_.dim()) throw InputError("glue: local field dimension mismatch");
}

double GlobalExtension::value(const Vec& y) const {
    if (!partition_.in_union(y)) throw InputError("glued field: " + to_string(y) + " lies outside the cover");
    const auto w = partition_.weights(y);
    double acc = 0.0;
    for (std::size_t j = 0; j < local_.size(); ++j)
        if (w[j] > 0.0) acc += w[j] * local_[j]->value(y);
    if (w.back() > 0.0) acc += w.back() * u_(y);
    return acc;
}

nlohmann::json GlobalExtension::descriptor() const {
    nlohmann::json l = nlohmann::json::array();
    for (const auto& f : local_) l.push_back(f->descriptor());
    return {{"id", "glued"}, {"function", u_.descriptor()}, {"partition", partition_.to_json()}, {"local", l}};
}

std::shared_ptr<GlobalExtension> glue_global(const FunctionSpec& u, const PartitionOfUnity& partition,
                                             std::vector<std::shared_ptr<const ScalarField>> local,
                                             std::span<const Vec> probes) {
    partition.validate(probes, 1e-9);
    return std::make_shared<GlobalExtension>(u, partition, std::move(local));
}

}  // namespace scx
