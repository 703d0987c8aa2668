#include "viscocal/assembly.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace viscocal {

void MaterialParams::validate() const {
    if (young_E <= 0.0) throw std::invalid_argument("MaterialParams: E must be > 0");
    if (!(poisson_nu > -1.0 && poisson_nu < 0.5))
        throw std::invalid_argument("MaterialParams: nu must lie in (-1, 0.5)");
    if (density <= 0.0) throw std::invalid_argument("MaterialParams: density must be > 0");
}

namespace {

using Mat12 = Eigen::Matrix<double, 12, 12>;
using Mat6x12 = Eigen::Matrix<double, 6, 12>;
using Mat6 = Eigen::Matrix<double, 6, 6>;

struct ElementGeometry {
    double volume;
    Mat6x12 B;  // engineering Voigt strain-displacement (xx,yy,zz,yz,xz,xy)
};

ElementGeometry element_geometry(const BeamMesh& mesh, const std::array<int, 4>& tet) {
    Eigen::Matrix3d Dm;
    const auto& x0 = mesh.nodes[std::size_t(tet[0])];
    for (int a = 1; a < 4; ++a) {
        const auto& xa = mesh.nodes[std::size_t(tet[std::size_t(a)])];
        for (int c = 0; c < 3; ++c) Dm(c, a - 1) = xa[std::size_t(c)] - x0[std::size_t(c)];
    }
    const double det = Dm.determinant();
    if (det <= 0.0) throw std::runtime_error("assemble: inverted element");

    Eigen::Matrix<double, 4, 3> grad;  // row a: grad of P1 basis a
    const Eigen::Matrix3d Dinv = Dm.inverse();
    grad.block<3, 3>(1, 0) = Dinv;
    grad.row(0) = -(Dinv.row(0) + Dinv.row(1) + Dinv.row(2));

    ElementGeometry g;
    g.volume = det / 6.0;
    g.B.setZero();
    for (int a = 0; a < 4; ++a) {
        const double gx = grad(a, 0), gy = grad(a, 1), gz = grad(a, 2);
        const int col = 3 * a;
        g.B(0, col) = gx;
        g.B(1, col + 1) = gy;
        g.B(2, col + 2) = gz;
        g.B(3, col + 1) = gz; g.B(3, col + 2) = gy;
        g.B(4, col) = gz;     g.B(4, col + 2) = gx;
        g.B(5, col) = gy;     g.B(5, col + 1) = gx;
    }
    return g;
}

} // namespace

BeamAssembly assemble(const BeamMesh& mesh, const MaterialParams& mat, ViscousForm form,
                      bool eliminate_dirichlet) {
    mat.validate();
    const double mu = mat.mu(), lambda = mat.lambda();
    const std::size_t nn = mesh.node_count();
    const std::size_t ndof_full = 3 * nn;

    // Voigt quadratic forms: eps:eps carries 1/2 on engineering shears,
    // tr otimes tr is the ones block, deviatoric = eps:eps - tr/3.
    Mat6 D_full = Mat6::Zero(), D_tr = Mat6::Zero();
    for (int i = 0; i < 3; ++i) {
        D_full(i, i) = 1.0;
        D_full(i + 3, i + 3) = 0.5;
        for (int j = 0; j < 3; ++j) D_tr(i, j) = 1.0;
    }
    const Mat6 D_dev = D_full - D_tr / 3.0;
    const Mat6 D_C = 2.0 * mu * D_full + lambda * D_tr;

    std::vector<Eigen::Triplet<double>> tM, tC, tD, tT;
    const std::size_t per_elem = 144;
    tM.reserve(mesh.tets.size() * per_elem);
    tC.reserve(mesh.tets.size() * per_elem);
    tD.reserve(mesh.tets.size() * per_elem);
    tT.reserve(mesh.tets.size() * per_elem);

    for (const auto& tet : mesh.tets) {
        const ElementGeometry g = element_geometry(mesh, tet);
        const Mat12 KC = g.volume * g.B.transpose() * D_C * g.B;
        const Mat12 KD = g.volume * g.B.transpose() * D_dev * g.B;
        const Mat12 KT = g.volume * g.B.transpose() * D_tr * g.B;
        Mat12 Me = Mat12::Zero();
        const double base = mat.density * g.volume / 20.0;
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) {
                const double mab = base * (a == b ? 2.0 : 1.0);
                for (int c = 0; c < 3; ++c) Me(3 * a + c, 3 * b + c) = mab;
            }
        int dof[12];
        for (int a = 0; a < 4; ++a)
            for (int c = 0; c < 3; ++c) dof[3 * a + c] = 3 * tet[std::size_t(a)] + c;
        for (int a = 0; a < 12; ++a)
            for (int b = 0; b < 12; ++b) {
                tM.emplace_back(dof[a], dof[b], Me(a, b));
                tC.emplace_back(dof[a], dof[b], KC(a, b));
                tD.emplace_back(dof[a], dof[b], KD(a, b));
                tT.emplace_back(dof[a], dof[b], KT(a, b));
            }
    }

    const long nfull = static_cast<long>(ndof_full);
    SpMat Mf(nfull, nfull), Cf(nfull, nfull), Df(nfull, nfull), Tf(nfull, nfull);
    Mf.setFromTriplets(tM.begin(), tM.end());
    Cf.setFromTriplets(tC.begin(), tC.end());
    Df.setFromTriplets(tD.begin(), tD.end());
    Tf.setFromTriplets(tT.begin(), tT.end());

    BeamAssembly out;
    out.material = mat;
    out.viscous_form = form;

    // Dirichlet elimination: drop all DOFs of nodes on x = 0
    std::vector<int> full_to_red(ndof_full, -1);
    for (std::size_t n = 0; n < nn; ++n) {
        if (eliminate_dirichlet && std::abs(mesh.nodes[n][0]) < 1e-12 * mesh.Lx) continue;
        for (int c = 0; c < 3; ++c) {
            full_to_red[3 * n + std::size_t(c)] = int(out.free_dofs.size());
            out.free_dofs.push_back(int(3 * n) + c);
        }
    }
    const long nred = long(out.free_dofs.size());

    auto reduce = [&](const SpMat& A) {
        std::vector<Eigen::Triplet<double>> trip;
        trip.reserve(std::size_t(A.nonZeros()));
        for (int kcol = 0; kcol < A.outerSize(); ++kcol)
            for (SpMat::InnerIterator it(A, kcol); it; ++it) {
                const int ri = full_to_red[std::size_t(it.row())];
                const int rj = full_to_red[std::size_t(it.col())];
                if (ri >= 0 && rj >= 0) trip.emplace_back(ri, rj, it.value());
            }
        SpMat R(nred, nred);
        R.setFromTriplets(trip.begin(), trip.end());
        R.makeCompressed();
        return R;
    };
    out.M = reduce(Mf);
    out.K_C = reduce(Cf);
    out.K_dev = reduce(Df);
    out.K_tr = reduce(Tf);

    out.K_visc_eps = (form == ViscousForm::Deviatoric)
                         ? SpMat(2.0 * mu * out.K_dev)
                         : SpMat(2.0 * mu * (out.K_dev + out.K_tr / 3.0));
    out.K_visc_tr = mat.bulk() * out.K_tr;

    // tip-face traction basis and area-weighted mean observation
    std::vector<double> node_area(nn, 0.0);
    double total_area = 0.0;
    for (const auto& tri : mesh.neumann_facets) {
        const auto& a = mesh.nodes[std::size_t(tri[0])];
        const auto& b = mesh.nodes[std::size_t(tri[1])];
        const auto& c = mesh.nodes[std::size_t(tri[2])];
        const double u[3] = {b[0] - a[0], b[1] - a[1], b[2] - a[2]};
        const double v[3] = {c[0] - a[0], c[1] - a[1], c[2] - a[2]};
        const double cx = u[1] * v[2] - u[2] * v[1];
        const double cy = u[2] * v[0] - u[0] * v[2];
        const double cz = u[0] * v[1] - u[1] * v[0];
        const double area = 0.5 * std::sqrt(cx * cx + cy * cy + cz * cz);
        total_area += area;
        for (int n : tri) node_area[std::size_t(n)] += area / 3.0;
    }
    out.tip_area = total_area;

    out.traction_basis = Eigen::MatrixXd::Zero(nred, 3);
    out.observation = Eigen::MatrixXd::Zero(3, nred);
    for (std::size_t n = 0; n < nn; ++n) {
        if (node_area[n] == 0.0) continue;
        for (int c = 0; c < 3; ++c) {
            const int rd = full_to_red[3 * n + std::size_t(c)];
            if (rd < 0) continue;
            out.traction_basis(rd, c) = node_area[n];
            out.observation(c, rd) = node_area[n] / total_area;
        }
    }
    return out;
}

Vec load_vector(const BeamAssembly& asmb, const LoadSpec& spec, double t) {
    if (t < 0.0) throw std::invalid_argument("load_vector: t must be >= 0");
    return spec.profile(t) * asmb.traction_basis.col(spec.direction());
}

} // namespace viscocal
