#ifndef VISCOCAL_ASSEMBLY_HPP
#define VISCOCAL_ASSEMBLY_HPP

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "viscocal/mesh.hpp"

namespace viscocal {

using SpMat = Eigen::SparseMatrix<double>;
using Vec = Eigen::VectorXd;

struct MaterialParams {
    double young_E = 1e3;
    double poisson_nu = 0.3;
    double density = 1.0;

    double mu() const { return young_E / (2.0 * (1.0 + poisson_nu)); }
    double lambda() const {
        return young_E * poisson_nu / ((1.0 + poisson_nu) * (1.0 - 2.0 * poisson_nu));
    }
    double bulk() const { return lambda() + 2.0 * mu() / 3.0; }  // modulus of the trace split
    void validate() const;
};

/// Which fourth-order tensor multiplies the k_eps memory term.
/// Deviatoric: the deviatoric projector (the two-kernel experiment form).
/// Identity: the full strain, eps-kernel operator becomes 2mu (K_dev + K_tr/3).
enum class ViscousForm { Deviatoric, Identity };

struct LoadSpec {
    enum class Kind { Bending, Extension } kind = Kind::Bending;
    double magnitude = 1.0;   // B0 or T0
    double t_load = 0.8;

    double profile(double t) const {  // ramp, released after t_load
        return (t >= 0.0 && t <= t_load) ? magnitude * t / t_load : 0.0;
    }
    int direction() const { return kind == Kind::Bending ? 1 : 0; }  // y or x
};

/// Time-independent FEM objects on the Dirichlet-reduced DOF set.
struct BeamAssembly {
    SpMat M;       // consistent mass, SPD
    SpMat K_C;     // elastic stiffness from C eps : eps
    SpMat K_dev;   // deviatoric product eps_d : eps_d (unit modulus)
    SpMat K_tr;    // trace product tr eps tr eps (unit modulus)

    // modulus-weighted viscous operators consumed by the time stepper:
    // K_C = visc_eps-part + visc_tr-part exactly (isotropic split identity)
    SpMat K_visc_eps;   // 2 mu K_dev  (Deviatoric) or 2 mu (K_dev + K_tr/3) (Identity)
    SpMat K_visc_tr;    // (lambda + 2 mu/3) K_tr

    Eigen::MatrixXd traction_basis;  // ndof x 3: unit tip traction in each direction
    Eigen::MatrixXd observation;     // 3 x ndof: area-weighted mean over the tip face

    std::vector<int> free_dofs;      // reduced index -> full index (3*node + comp)
    MaterialParams material;
    ViscousForm viscous_form = ViscousForm::Deviatoric;
    double tip_area = 0.0;

    Eigen::Index dof_count() const { return M.rows(); }
};

/// eliminate_dirichlet = false keeps all DOFs (for assembly-identity checks).
BeamAssembly assemble(const BeamMesh& mesh, const MaterialParams& mat,
                      ViscousForm form = ViscousForm::Deviatoric,
                      bool eliminate_dirichlet = true);

/// Nodal force vector for the ramp traction at time t (zero after release).
Vec load_vector(const BeamAssembly& asmb, const LoadSpec& spec, double t);

} // namespace viscocal

#endif
