#include "qsst/state.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qsst {

namespace {

std::int64_t checked_dim(int num_photons) {
    if (num_photons < 0 || num_photons > kMaxPhotons)
        throw std::invalid_argument("photon count out of range (0.." + std::to_string(kMaxPhotons) + ")");
    return std::int64_t{1} << num_photons;
}

void check_photon(const PureState& s, int photon, bool allow_lost = false) {
    if (photon < 0 || photon >= s.num_photons())
        throw std::out_of_range("photon index " + std::to_string(photon) + " out of range");
    if (!allow_lost && s.lost(photon))
        throw std::invalid_argument("photon " + std::to_string(photon) + " is lost; its polarization is inaccessible");
}

}  // namespace

std::string PauliOp::str() const {
    const char* k = kind == Kind::I ? "I" : kind == Kind::X ? "X" : kind == Kind::Z ? "Z" : "XZ";
    return std::string(k) + "@" + std::to_string(target);
}

PureState::PureState(int num_photons, Eigen::VectorXcd amplitudes, std::vector<std::uint8_t> lost)
    : num_photons_(num_photons), amps_(std::move(amplitudes)), lost_(std::move(lost)) {
    const std::int64_t d = checked_dim(num_photons);
    if (amps_.size() != d) throw std::invalid_argument("amplitude vector length must be exactly 2^num_photons");
    if (lost_.empty()) lost_.assign(static_cast<std::size_t>(num_photons), 0);
    if (lost_.size() != static_cast<std::size_t>(num_photons))
        throw std::invalid_argument("lost-flag vector length must equal num_photons");
}

bool PureState::lost(int photon) const {
    if (photon < 0 || photon >= num_photons_) throw std::out_of_range("photon index out of range");
    return lost_[static_cast<std::size_t>(photon)] != 0;
}

int PureState::num_lost() const {
    int k = 0;
    for (auto f : lost_) k += f ? 1 : 0;
    return k;
}

PureState PureState::mark_lost(const std::vector<int>& photons) const {
    auto flags = lost_;
    for (int p : photons) {
        if (p < 0 || p >= num_photons_) throw std::out_of_range("photon index out of range");
        flags[static_cast<std::size_t>(p)] = 1;
    }
    return PureState(num_photons_, amps_, std::move(flags));
}

PureState PureState::normalized() const {
    const double n = std::sqrt(norm_sq());
    if (n <= 0.0) throw std::invalid_argument("cannot normalize a zero state");
    return PureState(num_photons_, amps_ / n, lost_);
}

PureState make_state(const std::vector<std::pair<std::string, cx>>& terms) {
    if (terms.empty()) throw std::invalid_argument("make_state: at least one term required");
    const std::size_t len = terms.front().first.size();
    if (len == 0 || len > static_cast<std::size_t>(kMaxPhotons))
        throw std::invalid_argument("make_state: bitstring length out of range");
    Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(std::int64_t{1} << len);
    for (const auto& [bits, coeff] : terms) {
        if (bits.size() != len) throw std::invalid_argument("make_state: inconsistent bitstring lengths");
        std::int64_t idx = 0;
        for (std::size_t k = 0; k < len; ++k) {
            const char c = bits[k];
            if (c == 'V' || c == 'v' || c == '1') idx |= std::int64_t{1} << k;
            else if (!(c == 'H' || c == 'h' || c == '0'))
                throw std::invalid_argument("make_state: bitstring characters must be H or V");
        }
        amps(idx) += coeff;
    }
    const double n2 = amps.squaredNorm();
    if (n2 <= 0.0) throw std::invalid_argument("make_state: all amplitudes are zero");
    return PureState(static_cast<int>(len), amps / std::sqrt(n2));
}

PureState tensor(const PureState& a, const PureState& b) {
    const int n = a.num_photons() + b.num_photons();
    checked_dim(n);
    Eigen::VectorXcd amps(std::int64_t{1} << n);
    const std::int64_t da = a.dim();
    for (std::int64_t ib = 0; ib < b.dim(); ++ib)
        for (std::int64_t ia = 0; ia < da; ++ia)
            amps((ib << a.num_photons()) | ia) = a.amplitude(ia) * b.amplitude(ib);
    std::vector<std::uint8_t> lost;
    lost.reserve(static_cast<std::size_t>(n));
    for (int k = 0; k < a.num_photons(); ++k) lost.push_back(a.lost(k) ? 1 : 0);
    for (int k = 0; k < b.num_photons(); ++k) lost.push_back(b.lost(k) ? 1 : 0);
    return PureState(n, std::move(amps), std::move(lost));
}

PureState apply_pauli(const PureState& state, const PauliOp& op) {
    check_photon(state, op.target);
    const std::int64_t bit = std::int64_t{1} << op.target;
    Eigen::VectorXcd amps = state.amplitudes();
    const bool do_z = op.kind == PauliOp::Kind::Z || op.kind == PauliOp::Kind::XZ;
    const bool do_x = op.kind == PauliOp::Kind::X || op.kind == PauliOp::Kind::XZ;
    if (do_z)
        for (std::int64_t i = 0; i < amps.size(); ++i)
            if (i & bit) amps(i) = -amps(i);
    if (do_x)
        for (std::int64_t i = 0; i < amps.size(); ++i)
            if (!(i & bit)) std::swap(amps(i), amps(i | bit));
    std::vector<std::uint8_t> lost;
    for (int k = 0; k < state.num_photons(); ++k) lost.push_back(state.lost(k) ? 1 : 0);
    return PureState(state.num_photons(), std::move(amps), std::move(lost));
}

PureState permute_photons(const PureState& state, const std::vector<int>& new_index_of_old) {
    const int n = state.num_photons();
    if (new_index_of_old.size() != static_cast<std::size_t>(n))
        throw std::invalid_argument("permute_photons: permutation size mismatch");
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    for (int v : new_index_of_old) {
        if (v < 0 || v >= n || seen[static_cast<std::size_t>(v)]) throw std::invalid_argument("permute_photons: not a permutation");
        seen[static_cast<std::size_t>(v)] = 1;
    }
    Eigen::VectorXcd amps(state.dim());
    for (std::int64_t i = 0; i < state.dim(); ++i) {
        std::int64_t j = 0;
        for (int k = 0; k < n; ++k)
            if (i & (std::int64_t{1} << k)) j |= std::int64_t{1} << new_index_of_old[static_cast<std::size_t>(k)];
        amps(j) = state.amplitude(i);
    }
    std::vector<std::uint8_t> lost(static_cast<std::size_t>(n), 0);
    for (int k = 0; k < n; ++k)
        if (state.lost(k)) lost[static_cast<std::size_t>(new_index_of_old[static_cast<std::size_t>(k)])] = 1;
    return PureState(n, std::move(amps), std::move(lost));
}

namespace {

void check_projector_basis(const std::vector<PureState>& kets) {
    if (kets.empty()) throw std::invalid_argument("projector basis must be nonempty");
    if (kets.size() > 4) throw std::invalid_argument("projector basis exceeds the two-photon space");
    for (const auto& k : kets)
        if (k.num_photons() != 2) throw std::invalid_argument("projector kets must be two-photon states");
    for (std::size_t a = 0; a < kets.size(); ++a)
        for (std::size_t b = 0; b <= a; ++b) {
            const cx g = kets[a].amplitudes().dot(kets[b].amplitudes());
            const double want = a == b ? 1.0 : 0.0;
            if (std::abs(g - want) > 1e-10)
                throw std::invalid_argument("projector kets are not orthonormal (Gram deviation > 1e-10)");
        }
}

}  // namespace

std::vector<ProjectionBranch> project_two_photon_branches(const PureState& state, int i, int j,
                                                          const std::vector<PureState>& projector_basis,
                                                          double drop_tol, bool loss_aware) {
    if (i == j) throw std::invalid_argument("project_two_photon: photon indices must differ");
    check_photon(state, i, loss_aware);
    check_photon(state, j, loss_aware);
    check_projector_basis(projector_basis);

    const int n = state.num_photons();
    const std::int64_t bi = std::int64_t{1} << i;
    const std::int64_t bj = std::int64_t{1} << j;

    // Residual index = full index with bits i and j squeezed out.
    std::vector<std::uint8_t> rest_lost;
    for (int k = 0; k < n; ++k)
        if (k != i && k != j) rest_lost.push_back(state.lost(k) ? 1 : 0);

    std::vector<ProjectionBranch> out;
    for (std::size_t b = 0; b < projector_basis.size(); ++b) {
        const auto& ket = projector_basis[b];
        Eigen::VectorXcd post = Eigen::VectorXcd::Zero(std::int64_t{1} << (n - 2));
        for (std::int64_t idx = 0; idx < state.dim(); ++idx) {
            const cx a = state.amplitude(idx);
            if (a == cx(0.0, 0.0)) continue;
            const int pi = (idx & bi) ? 1 : 0;
            const int pj = (idx & bj) ? 1 : 0;
            const cx w = std::conj(ket.amplitude(pi | (pj << 1)));
            if (w == cx(0.0, 0.0)) continue;
            std::int64_t r = 0;
            int pos = 0;
            for (int k = 0; k < n; ++k) {
                if (k == i || k == j) continue;
                if (idx & (std::int64_t{1} << k)) r |= std::int64_t{1} << pos;
                ++pos;
            }
            post(r) += w * a;
        }
        const double p = post.squaredNorm();
        if (p < drop_tol) continue;
        out.push_back(ProjectionBranch{static_cast<int>(b), p,
                                       PureState(n - 2, post / std::sqrt(p), rest_lost)});
    }
    return out;
}

ProjectionBranch project_two_photon(const PureState& state, int i, int j,
                                    const std::vector<PureState>& projector_basis, Rng& rng) {
    auto branches = project_two_photon_branches(state, i, j, projector_basis, 0.0);
    double total = 0.0;
    for (const auto& br : branches) total += br.probability;
    if (total < 1.0 - 1e-10)
        throw std::invalid_argument("project_two_photon: projector set does not span the pair (total probability "
                                    + std::to_string(total) + ")");
    std::uniform_real_distribution<double> u(0.0, total);
    double x = u(rng);
    for (const auto& br : branches) {
        if (x < br.probability) return br;
        x -= br.probability;
    }
    return branches.back();
}

DensityMatrix DensityMatrix::from_pure(const PureState& psi) {
    if (psi.num_lost() > 0) {
        // Deferred dephasing: a density matrix of a state with lost photons
        // is its reduction onto the held ones.
        std::vector<int> keep;
        for (int k = 0; k < psi.num_photons(); ++k)
            if (!psi.lost(k)) keep.push_back(k);
        return partial_trace(psi, keep);
    }
    const auto& a = psi.amplitudes();
    return DensityMatrix(psi.num_photons(), a * a.adjoint());
}

DensityMatrix::DensityMatrix(int num_photons, Eigen::MatrixXcd matrix)
    : num_photons_(num_photons), matrix_(std::move(matrix)) {
    const std::int64_t d = checked_dim(num_photons);
    if (matrix_.rows() != d || matrix_.cols() != d)
        throw std::invalid_argument("density matrix must be 2^num_photons square");
    validate();
}

double DensityMatrix::purity() const { return (matrix_ * matrix_).trace().real(); }

void DensityMatrix::validate() const {
    if ((matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff() > kSpectralTol)
        throw std::invalid_argument("density matrix is not Hermitian within 1e-10");
    if (std::abs(matrix_.trace() - cx(1.0, 0.0)) > kSpectralTol)
        throw std::invalid_argument("density matrix trace differs from 1 by more than 1e-10");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(matrix_, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -kSpectralTol)
        throw std::invalid_argument("density matrix has an eigenvalue below -1e-10");
}

namespace {

template <typename Amp>
DensityMatrix trace_down(int n, const std::vector<int>& keep, Amp&& entry) {
    if (keep.empty()) throw std::invalid_argument("partial_trace: keep set must be nonempty");
    std::vector<int> ks = keep;
    std::sort(ks.begin(), ks.end());
    if (std::adjacent_find(ks.begin(), ks.end()) != ks.end())
        throw std::invalid_argument("partial_trace: duplicate photon in keep set");
    if (ks.front() < 0 || ks.back() >= n) throw std::out_of_range("partial_trace: photon index out of range");

    std::vector<int> tr;
    for (int k = 0; k < n; ++k)
        if (!std::binary_search(ks.begin(), ks.end(), k)) tr.push_back(k);

    const int nk = static_cast<int>(ks.size());
    const int nt = static_cast<int>(tr.size());
    const std::int64_t dk = std::int64_t{1} << nk;
    const std::int64_t dt = std::int64_t{1} << nt;

    auto expand = [&](std::int64_t kept, std::int64_t traced) {
        std::int64_t full = 0;
        for (int b = 0; b < nk; ++b)
            if (kept & (std::int64_t{1} << b)) full |= std::int64_t{1} << ks[static_cast<std::size_t>(b)];
        for (int b = 0; b < nt; ++b)
            if (traced & (std::int64_t{1} << b)) full |= std::int64_t{1} << tr[static_cast<std::size_t>(b)];
        return full;
    };

    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dk, dk);
    for (std::int64_t r = 0; r < dk; ++r)
        for (std::int64_t c = 0; c < dk; ++c) {
            cx sum(0.0, 0.0);
            for (std::int64_t t = 0; t < dt; ++t) sum += entry(expand(r, t), expand(c, t));
            rho(r, c) = sum;
        }
    // Guard against drift from upstream float error before validation.
    const cx tr_rho = rho.trace();
    if (std::abs(tr_rho) > 0.0) rho /= tr_rho.real();
    return DensityMatrix(nk, std::move(rho));
}

}  // namespace

DensityMatrix partial_trace(const PureState& state, const std::vector<int>& keep) {
    for (int k : keep)
        if (k >= 0 && k < state.num_photons() && state.lost(k))
            throw std::invalid_argument("partial_trace: keep set contains a lost photon");
    const double n2 = state.norm_sq();
    if (std::abs(n2 - 1.0) > 1e-9) throw std::invalid_argument("partial_trace: state is not normalized");
    return trace_down(state.num_photons(), keep, [&](std::int64_t r, std::int64_t c) {
        return state.amplitude(r) * std::conj(state.amplitude(c));
    });
}

DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<int>& keep) {
    return trace_down(rho.num_photons(), keep, [&](std::int64_t r, std::int64_t c) { return rho.matrix()(r, c); });
}

double fidelity(const DensityMatrix& rho, const PureState& target) {
    if (target.num_photons() != rho.num_photons())
        throw std::invalid_argument("fidelity: dimension mismatch");
    if (target.num_lost() > 0) throw std::invalid_argument("fidelity: target has lost photons");
    const cx v = target.amplitudes().dot(rho.matrix() * target.amplitudes());
    if (std::abs(v.imag()) > kSpectralTol) throw std::runtime_error("fidelity: non-real expectation");
    return std::clamp(v.real(), 0.0, 1.0 + 1e-9);
}

double fidelity(const PureState& a, const PureState& b) {
    const cx v = inner(a, b);
    return std::norm(v);
}

cx inner(const PureState& a, const PureState& b) {
    if (a.num_photons() != b.num_photons()) throw std::invalid_argument("inner: dimension mismatch");
    return a.amplitudes().dot(b.amplitudes());
}

}  // namespace qsst
