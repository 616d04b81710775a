#pragma once

#include <array>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace dgn
{

// Deformation state with non-positive Jacobian. Assembly annotates the
// offending cell before rethrowing.
struct InvertedElementError : std::runtime_error
{
   explicit InvertedElementError(double det, int cell = -1)
      : std::runtime_error("inverted element" +
                           (cell >= 0 ? " in cell " + std::to_string(cell) : "") +
                           ", det F = " + std::to_string(det)),
        cell(cell), det_f(det)
   {
   }
   int cell;
   double det_f;
};

// Constitutive law for scalar problems: energy density psi(g), flux
// sigma(g) = d psi / d g, and tangent d sigma / d g, all functions of the
// solution gradient g.
class ScalarMaterial
{
public:
   virtual ~ScalarMaterial() = default;
   virtual double energy(const Eigen::Vector2d &g) const = 0;
   virtual Eigen::Vector2d stress(const Eigen::Vector2d &g) const = 0;
   virtual Eigen::Matrix2d tangent(const Eigen::Vector2d &g) const = 0;
   // Representative stiffness magnitude, used to scale penalty parameters.
   virtual double stiffness_scale() const = 0;
   // Whether g lies past the yield surface; laws without one say no.
   virtual bool plastic(const Eigen::Vector2d &) const { return false; }
};

// Linear law sigma = k g.
class ScalarLinearMaterial : public ScalarMaterial
{
public:
   explicit ScalarLinearMaterial(double k) : k_(k) {}
   double k() const { return k_; }
   double energy(const Eigen::Vector2d &g) const override;
   Eigen::Vector2d stress(const Eigen::Vector2d &g) const override;
   Eigen::Matrix2d tangent(const Eigen::Vector2d &g) const override;
   double stiffness_scale() const override { return k_; }

private:
   double k_;
};

// Perfectly plastic antiplane shear. Elastic below the yield stress,
// constant stress magnitude sigma_y beyond it:
//
//   |G g| <= sigma_y :  sigma = G g
//   |G g| >  sigma_y :  sigma = sigma_y g / |g|
//
// The energy is the C1 matching pair  G |g|^2 / 2  and
// sigma_y |g| - sigma_y^2 / (2 G). The plastic tangent keeps only the
// component transverse to g, scaled G, plus a small regularization that
// keeps it invertible:
//
//   sigma' = G (I - ghat ghat^T) + eps_reg G I
//
// On the yield surface this equals the exact derivative of sigma.
class AntiplaneShearMaterial : public ScalarMaterial
{
public:
   AntiplaneShearMaterial(double shear_modulus, double yield_stress,
                          double eps_reg = 1e-4, double eps_grad = 1e-12)
      : G_(shear_modulus), sigma_y_(yield_stress), eps_reg_(eps_reg),
        eps_grad_(eps_grad)
   {
   }

   double shear_modulus() const { return G_; }
   double yield_stress() const { return sigma_y_; }
   bool plastic(const Eigen::Vector2d &g) const override
   {
      return G_ * g.norm() > sigma_y_;
   }

   double energy(const Eigen::Vector2d &g) const override;
   Eigen::Vector2d stress(const Eigen::Vector2d &g) const override;
   Eigen::Matrix2d tangent(const Eigen::Vector2d &g) const override;
   double stiffness_scale() const override { return G_; }

private:
   double G_, sigma_y_, eps_reg_, eps_grad_;
};

// Fourth-order tangent d P / d F with entries (i, J, k, L); (i, J) pairs
// with the test function, (k, L) with the trial function. Major symmetry
// holds term by term.
struct Tangent4
{
   std::array<double, 81> a{};

   double &operator()(int i, int J, int k, int L)
   {
      return a[((i * 3 + J) * 3 + k) * 3 + L];
   }
   double operator()(int i, int J, int k, int L) const
   {
      return a[((i * 3 + J) * 3 + k) * 3 + L];
   }

   // (L : M)_{iJ} = L_{iJkL} M_{kL}
   Eigen::Matrix3d contract(const Eigen::Matrix3d &M) const;

   // Rows indexed by (i, J) as 3 i + J, columns by (k, L) as 3 k + L.
   Eigen::Matrix<double, 9, 9> as_matrix() const;
};

// Compressible Mooney-Rivlin solid,
//
//   psi(F) = mu1/2 J^(-2/3) I1 + mu2/2 J^(-4/3) I2 + K/2 (J - 1)^2
//
// with J = det F, I1 = tr(F F^T), I2 = (I1^2 - tr((F F^T)^2)) / 2.
// Moduli derive from Young's modulus and Poisson ratio:
// mu = E / (2 (1 + nu)), mu1 = mu2 = mu / 2, K = E / (3 (1 - 2 nu)).
// Stress and tangent throw InvertedElementError when det F <= 0.
class MooneyRivlinMaterial
{
public:
   static MooneyRivlinMaterial from_moduli(double youngs, double poisson);
   MooneyRivlinMaterial(double mu1, double mu2, double bulk)
      : mu1_(mu1), mu2_(mu2), K_(bulk)
   {
   }

   double mu1() const { return mu1_; }
   double mu2() const { return mu2_; }
   double bulk() const { return K_; }
   double shear() const { return mu1_ + mu2_; }

   double energy(const Eigen::Matrix3d &F) const;
   Eigen::Matrix3d stress(const Eigen::Matrix3d &F) const;
   Tangent4 tangent(const Eigen::Matrix3d &F) const;

private:
   double mu1_, mu2_, K_;
};

// J, I1, I2 of a deformation gradient.
struct Invariants
{
   double J, I1, I2;
};
Invariants invariants(const Eigen::Matrix3d &F);

} // namespace dgn
