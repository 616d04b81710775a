#include <doctest.h>

#include <cmath>
#include <random>

#include <dgnewton/fem.hpp>
#include <dgnewton/mesh.hpp>

using namespace dgn;

namespace
{

double factorial(int k)
{
   double f = 1.0;
   for (int i = 2; i <= k; ++i)
   {
      f *= i;
   }
   return f;
}

// Exact monomial integrals over the reference simplices:
//   segment: 1/(a+1)
//   triangle: a! b! / (a+b+2)!
//   tet:      a! b! c! / (a+b+c+3)!
double exact_monomial(int dim, int a, int b, int c)
{
   if (dim == 1)
   {
      return 1.0 / (a + 1);
   }
   if (dim == 2)
   {
      return factorial(a) * factorial(b) / factorial(a + b + 2);
   }
   return factorial(a) * factorial(b) * factorial(c) / factorial(a + b + c + 3);
}

double apply_rule(const QuadratureRule &rule, int a, int b, int c)
{
   double sum = 0.0;
   for (int q = 0; q < rule.size(); ++q)
   {
      const Eigen::Vector3d &p = rule.points[q];
      sum += rule.weights[q] * std::pow(p.x(), a) * std::pow(p.y(), b) *
             std::pow(p.z(), c);
   }
   return sum;
}

} // namespace

TEST_CASE("quadrature rules integrate monomials exactly up to their degree")
{
   for (int dim = 1; dim <= 3; ++dim)
   {
      for (int degree = 1; degree <= 4; ++degree)
      {
         const QuadratureRule rule = quadrature(dim, degree);
         CHECK(rule.dim == dim);
         CHECK(rule.degree >= degree);

         double wsum = 0.0;
         for (double w : rule.weights)
         {
            wsum += w;
         }
         CHECK(wsum == doctest::Approx(exact_monomial(dim, 0, 0, 0)).epsilon(1e-14));

         for (int a = 0; a <= degree; ++a)
         {
            for (int b = 0; b <= (dim >= 2 ? degree - a : 0); ++b)
            {
               for (int c = 0; c <= (dim >= 3 ? degree - a - b : 0); ++c)
               {
                  INFO("dim ", dim, " degree ", degree, " monomial ", a, " ", b,
                       " ", c);
                  CHECK(apply_rule(rule, a, b, c) ==
                        doctest::Approx(exact_monomial(dim, a, b, c))
                           .epsilon(1e-12));
               }
            }
         }
      }
   }
}

TEST_CASE("quadrature rejects unsupported requests")
{
   CHECK_THROWS_AS(quadrature(2, 0), std::invalid_argument);
   CHECK_THROWS_AS(quadrature(2, 5), std::invalid_argument);
   CHECK_THROWS_AS(quadrature(0, 2), std::invalid_argument);
   CHECK_THROWS_AS(quadrature(4, 2), std::invalid_argument);
}

TEST_CASE("function space dof layout")
{
   Mesh mesh = unit_square_mesh(2);

   FunctionSpace dg(mesh, SpaceKind::DG);
   CHECK(dg.num_dofs() == 3 * mesh.num_cells());
   std::vector<int> seen(dg.num_dofs(), 0);
   for (int c = 0; c < mesh.num_cells(); ++c)
   {
      for (int k = 0; k < 3; ++k)
      {
         ++seen[dg.dof(c, k)];
      }
   }
   for (int s : seen)
   {
      CHECK(s == 1); // DG dofs are element-private
   }

   FunctionSpace cg(mesh, SpaceKind::CG);
   CHECK(cg.num_dofs() == mesh.num_vertices());
   for (int c = 0; c < mesh.num_cells(); ++c)
   {
      for (int k = 0; k < 3; ++k)
      {
         CHECK(cg.dof(c, k) == mesh.cells[c][k]);
      }
   }

   FunctionSpace vec(mesh, SpaceKind::DG, 1, 2);
   CHECK(vec.num_dofs() == 6 * mesh.num_cells());
   CHECK(vec.dof(1, 2, 1) == (1 * 3 + 2) * 2 + 1);

   CHECK_THROWS_AS(FunctionSpace(mesh, SpaceKind::DG, 2), std::invalid_argument);
}

TEST_CASE("P1 basis reproduces linear fields")
{
   Mesh mesh = box_mesh({1.0, 1.0, 1.0}, {1, 1, 1});
   std::mt19937 rng(42);
   std::uniform_real_distribution<double> unit(0.0, 1.0);

   auto linear = [](const Eigen::Vector3d &x)
   { return 2.0 + 3.0 * x.x() - x.y() + 0.5 * x.z(); };
   const Eigen::Vector3d grad_exact(3.0, -1.0, 0.5);

   for (int c = 0; c < mesh.num_cells(); ++c)
   {
      // Random barycentric point inside the cell.
      Eigen::Vector4d lambda;
      for (int k = 0; k < 4; ++k)
      {
         lambda[k] = unit(rng) + 0.05;
      }
      lambda /= lambda.sum();
      Eigen::Vector3d x = Eigen::Vector3d::Zero();
      for (int k = 0; k < 4; ++k)
      {
         x += lambda[k] * mesh.vertices[mesh.cells[c][k]];
      }

      const CellBasis basis = basis_eval(mesh, c, x);
      REQUIRE(basis.n == 4);

      double vsum = 0.0;
      double field = 0.0;
      Eigen::Vector3d gsum = Eigen::Vector3d::Zero();
      Eigen::Vector3d gfield = Eigen::Vector3d::Zero();
      for (int k = 0; k < 4; ++k)
      {
         vsum += basis.value[k];
         gsum += basis.grad[k];
         const double nodal = linear(mesh.vertices[mesh.cells[c][k]]);
         field += nodal * basis.value[k];
         gfield += nodal * basis.grad[k];
      }
      CHECK(vsum == doctest::Approx(1.0).epsilon(1e-13));
      CHECK(gsum.norm() < 1e-12);
      CHECK(field == doctest::Approx(linear(x)).epsilon(1e-12));
      CHECK((gfield - grad_exact).norm() < 1e-11);

      // Nodal property at the vertices.
      for (int k = 0; k < 4; ++k)
      {
         const CellBasis at_vertex =
            basis_eval(mesh, c, mesh.vertices[mesh.cells[c][k]]);
         for (int j = 0; j < 4; ++j)
         {
            CHECK(at_vertex.value[j] ==
                  doctest::Approx(j == k ? 1.0 : 0.0).epsilon(1e-12));
         }
      }
   }
}

TEST_CASE("face quadrature weights sum to the face measure")
{
   for (int degree = 1; degree <= 3; ++degree)
   {
      Mesh tri = unit_square_mesh(2);
      for (int f = 0; f < tri.num_faces(); ++f)
      {
         const auto pts = face_quadrature(tri, f, degree);
         double wsum = 0.0;
         for (const auto &p : pts)
         {
            wsum += p.weight;
         }
         CHECK(wsum == doctest::Approx(tri.faces[f].measure).epsilon(1e-13));
      }

      Mesh tet = box_mesh({1.0, 1.0, 1.0}, {1, 1, 1});
      for (int f = 0; f < tet.num_faces(); ++f)
      {
         const auto pts = face_quadrature(tet, f, degree);
         double wsum = 0.0;
         for (const auto &p : pts)
         {
            wsum += p.weight;
            // Points lie on the face plane.
            const Eigen::Vector3d d =
               p.x - tet.vertices[tet.faces[f].vertices[0]];
            CHECK(std::abs(tet.faces[f].normal.dot(d)) < 1e-12);
         }
         CHECK(wsum == doctest::Approx(tet.faces[f].measure).epsilon(1e-13));
      }
   }
}

TEST_CASE("traces select the agreed sides")
{
   Mesh mesh = unit_square_mesh(1);
   FunctionSpace dg(mesh, SpaceKind::DG);

   // Field equal to the cell index; its jump across the diagonal is
   // cell_plus - cell_minus = -1.
   Eigen::VectorXd u(dg.num_dofs());
   for (int c = 0; c < mesh.num_cells(); ++c)
   {
      for (int k = 0; k < 3; ++k)
      {
         u[dg.dof(c, k)] = c;
      }
   }

   int interior = -1;
   for (int f = 0; f < mesh.num_faces(); ++f)
   {
      if (!mesh.faces[f].boundary())
      {
         interior = f;
      }
   }
   REQUIRE(interior >= 0);
   const Face &face = mesh.faces[interior];

   for (const auto &p : face_quadrature(mesh, interior, 1))
   {
      const FaceTrace plus = trace_eval(mesh, interior, +1, p.x);
      const FaceTrace minus = trace_eval(mesh, interior, -1, p.x);
      CHECK(plus.cell == face.cell_plus);
      CHECK(minus.cell == face.cell_minus);

      double v_plus = 0.0;
      double v_minus = 0.0;
      for (int k = 0; k < 3; ++k)
      {
         v_plus += u[dg.dof(plus.cell, k)] * plus.basis.value[k];
         v_minus += u[dg.dof(minus.cell, k)] * minus.basis.value[k];
      }
      CHECK(v_plus - v_minus == doctest::Approx(-1.0).epsilon(1e-13));

      // The plus trace is the limit from the side the normal points away
      // from: stepping against the normal stays in the plus cell.
      const Eigen::Vector3d inside = p.x - 1e-8 * face.normal;
      const CellBasis probe = basis_eval(mesh, plus.cell, inside);
      for (int k = 0; k < 3; ++k)
      {
         CHECK(probe.value[k] > -1e-7);
      }
   }

   int boundary = 0;
   for (int f = 0; f < mesh.num_faces(); ++f)
   {
      if (mesh.faces[f].boundary())
      {
         boundary = f;
         break;
      }
   }
   const Eigen::Vector3d mid =
      0.5 * (mesh.vertices[mesh.faces[boundary].vertices[0]] +
             mesh.vertices[mesh.faces[boundary].vertices[1]]);
   CHECK_THROWS_AS(trace_eval(mesh, boundary, -1, mid), std::invalid_argument);
}

TEST_CASE("vector field evaluation and gradient")
{
   Mesh mesh = box_mesh({1.0, 1.0, 1.0}, {1, 1, 1});
   FunctionSpace space(mesh, SpaceKind::CG, 1, 3);

   Eigen::Matrix3d A;
   A << 1.0, 2.0, -0.5,
        0.0, -1.0, 0.25,
        3.0, 0.5, 2.0;
   const Eigen::Vector3d b(0.1, -0.2, 0.3);

   Eigen::VectorXd u(space.num_dofs());
   for (int v = 0; v < mesh.num_vertices(); ++v)
   {
      const Eigen::Vector3d val = A * mesh.vertices[v] + b;
      for (int comp = 0; comp < 3; ++comp)
      {
         u[3 * v + comp] = val[comp];
      }
   }

   for (int c = 0; c < mesh.num_cells(); ++c)
   {
      const Eigen::Vector3d x = cell_centroid(mesh, c);
      CHECK((eval_vector(space, u, c, x) - (A * x + b)).norm() < 1e-12);
      CHECK((grad_vector(space, u, c) - A).norm() < 1e-11);
   }
}

TEST_CASE("cg injection into dg has no jumps")
{
   Mesh mesh = unit_square_mesh(3);
   FunctionSpace cg(mesh, SpaceKind::CG);
   FunctionSpace dg(mesh, SpaceKind::DG);

   Eigen::VectorXd u_cg(cg.num_dofs());
   for (int v = 0; v < mesh.num_vertices(); ++v)
   {
      const Eigen::Vector3d &x = mesh.vertices[v];
      u_cg[v] = std::sin(3.0 * x.x()) + x.y() * x.y();
   }

   const Eigen::VectorXd u_dg = inject_cg_into_dg(cg, dg, u_cg);
   REQUIRE(u_dg.size() == dg.num_dofs());

   for (int f = 0; f < mesh.num_faces(); ++f)
   {
      if (mesh.faces[f].boundary())
      {
         continue;
      }
      for (const auto &p : face_quadrature(mesh, f, 2))
      {
         const FaceTrace plus = trace_eval(mesh, f, +1, p.x);
         const FaceTrace minus = trace_eval(mesh, f, -1, p.x);
         const double v_plus = eval_scalar(dg, u_dg, plus.cell, p.x);
         const double v_minus = eval_scalar(dg, u_dg, minus.cell, p.x);
         CHECK(std::abs(v_plus - v_minus) < 1e-13);
      }
   }
}
