#include "dgnewton/materials.hpp"

#include <cmath>

namespace dgn
{

double ScalarLinearMaterial::energy(const Eigen::Vector2d &g) const
{
   return 0.5 * k_ * g.squaredNorm();
}

Eigen::Vector2d ScalarLinearMaterial::stress(const Eigen::Vector2d &g) const
{
   return k_ * g;
}

Eigen::Matrix2d ScalarLinearMaterial::tangent(const Eigen::Vector2d &) const
{
   return k_ * Eigen::Matrix2d::Identity();
}

double AntiplaneShearMaterial::energy(const Eigen::Vector2d &g) const
{
   if (!plastic(g))
   {
      return 0.5 * G_ * g.squaredNorm();
   }
   return sigma_y_ * g.norm() - sigma_y_ * sigma_y_ / (2.0 * G_);
}

Eigen::Vector2d AntiplaneShearMaterial::stress(const Eigen::Vector2d &g) const
{
   if (!plastic(g))
   {
      return G_ * g;
   }
   return (sigma_y_ / std::max(g.norm(), eps_grad_)) * g;
}

Eigen::Matrix2d AntiplaneShearMaterial::tangent(const Eigen::Vector2d &g) const
{
   if (!plastic(g))
   {
      return G_ * Eigen::Matrix2d::Identity();
   }
   const double n2 = std::max(g.squaredNorm(), eps_grad_ * eps_grad_);
   Eigen::Matrix2d t;
   t << g.y() * g.y(), -g.x() * g.y(), -g.x() * g.y(), g.x() * g.x();
   return (G_ / n2) * t + eps_reg_ * G_ * Eigen::Matrix2d::Identity();
}

Eigen::Matrix3d Tangent4::contract(const Eigen::Matrix3d &M) const
{
   Eigen::Matrix3d R = Eigen::Matrix3d::Zero();
   for (int i = 0; i < 3; ++i)
   {
      for (int J = 0; J < 3; ++J)
      {
         double s = 0.0;
         for (int k = 0; k < 3; ++k)
         {
            for (int L = 0; L < 3; ++L)
            {
               s += (*this)(i, J, k, L) * M(k, L);
            }
         }
         R(i, J) = s;
      }
   }
   return R;
}

Eigen::Matrix<double, 9, 9> Tangent4::as_matrix() const
{
   Eigen::Matrix<double, 9, 9> M;
   for (int i = 0; i < 3; ++i)
   {
      for (int J = 0; J < 3; ++J)
      {
         for (int k = 0; k < 3; ++k)
         {
            for (int L = 0; L < 3; ++L)
            {
               M(3 * i + J, 3 * k + L) = (*this)(i, J, k, L);
            }
         }
      }
   }
   return M;
}

MooneyRivlinMaterial MooneyRivlinMaterial::from_moduli(double youngs,
                                                       double poisson)
{
   const double mu = youngs / (2.0 * (1.0 + poisson));
   const double bulk = youngs / (3.0 * (1.0 - 2.0 * poisson));
   return MooneyRivlinMaterial(0.5 * mu, 0.5 * mu, bulk);
}

Invariants invariants(const Eigen::Matrix3d &F)
{
   const Eigen::Matrix3d b = F * F.transpose();
   const double I1 = b.trace();
   return {F.determinant(), I1, 0.5 * (I1 * I1 - (b * b).trace())};
}

double MooneyRivlinMaterial::energy(const Eigen::Matrix3d &F) const
{
   const auto [J, I1, I2] = invariants(F);
   if (!(J > 0.0))
   {
      throw InvertedElementError(J);
   }
   return 0.5 * mu1_ * std::pow(J, -2.0 / 3.0) * I1 +
          0.5 * mu2_ * std::pow(J, -4.0 / 3.0) * I2 +
          0.5 * K_ * (J - 1.0) * (J - 1.0);
}

Eigen::Matrix3d MooneyRivlinMaterial::stress(const Eigen::Matrix3d &F) const
{
   const auto [J, I1, I2] = invariants(F);
   if (!(J > 0.0))
   {
      throw InvertedElementError(J);
   }
   const Eigen::Matrix3d G = F.inverse().transpose();
   const Eigen::Matrix3d b = F * F.transpose();
   const double Jm23 = std::pow(J, -2.0 / 3.0);
   const double Jm43 = std::pow(J, -4.0 / 3.0);
   return mu1_ * Jm23 * (F - I1 / 3.0 * G) +
          mu2_ * Jm43 * (I1 * F - b * F - 2.0 * I2 / 3.0 * G) +
          K_ * (J - 1.0) * J * G;
}

Tangent4 MooneyRivlinMaterial::tangent(const Eigen::Matrix3d &F) const
{
   const auto [J, I1, I2] = invariants(F);
   if (!(J > 0.0))
   {
      throw InvertedElementError(J);
   }
   const Eigen::Matrix3d G = F.inverse().transpose();
   const Eigen::Matrix3d b = F * F.transpose();
   const Eigen::Matrix3d C = F.transpose() * F;
   const Eigen::Matrix3d bF = b * F;
   const double Jm23 = std::pow(J, -2.0 / 3.0);
   const double Jm43 = std::pow(J, -4.0 / 3.0);

   Tangent4 T;
   for (int i = 0; i < 3; ++i)
   {
      for (int Jj = 0; Jj < 3; ++Jj)
      {
         for (int k = 0; k < 3; ++k)
         {
            for (int L = 0; L < 3; ++L)
            {
               const double id = (i == k && Jj == L) ? 1.0 : 0.0;
               const double dik = i == k ? 1.0 : 0.0;
               const double dJL = Jj == L ? 1.0 : 0.0;

               const double d1 =
                  Jm23 * (id - 2.0 / 3.0 * G(k, L) * F(i, Jj) +
                          2.0 * I1 / 9.0 * G(k, L) * G(i, Jj) -
                          2.0 / 3.0 * F(k, L) * G(i, Jj) +
                          I1 / 3.0 * G(i, L) * G(k, Jj));

               const double d2 =
                  Jm43 * (-4.0 * I1 / 3.0 * G(k, L) * F(i, Jj) +
                          4.0 / 3.0 * G(k, L) * bF(i, Jj) +
                          8.0 * I2 / 9.0 * G(k, L) * G(i, Jj) +
                          2.0 * F(k, L) * F(i, Jj) + I1 * id - dik * C(L, Jj) -
                          F(i, L) * F(k, Jj) - b(i, k) * dJL -
                          4.0 / 3.0 * (I1 * F(k, L) - bF(k, L)) * G(i, Jj) +
                          2.0 * I2 / 3.0 * G(i, L) * G(k, Jj));

               const double d3 = (2.0 * J - 1.0) * J * G(k, L) * G(i, Jj) -
                                 (J * J - J) * G(i, L) * G(k, Jj);

               T(i, Jj, k, L) = mu1_ * d1 + mu2_ * d2 + K_ * d3;
            }
         }
      }
   }
   return T;
}

} // namespace dgn
