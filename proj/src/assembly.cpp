#include "tdgl/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tdgl {

namespace {

CellType cell_type_of(const Mesh& mesh) { return mesh.dim() == 2 ? CellType::Triangle : CellType::Tetrahedron; }

QuadratureRule rule_for(const Mesh& mesh, int degree)
{
  return quadrature_rule(cell_type_of(mesh), std::min(degree, max_quadrature_degree(cell_type_of(mesh))));
}

void require_same_mesh(const DofMap& a, const DofMap& b)
{
  if (a.mesh_ptr() != b.mesh_ptr()) {
    throw std::invalid_argument("assembly: spaces live on different meshes");
  }
}

std::vector<char> constraint_mask(const DofMap& space, bool essential)
{
  std::vector<char> mask(space.num_dofs(), 0);
  if (essential) {
    for (int d : space.boundary_dofs()) {
      mask[d] = 1;
    }
  }
  return mask;
}

Vec3 current_density(const FieldValue<Complex>& psi, double kappa)
{
  Vec3 j{};
  for (int d = 0; d < 3; ++d) {
    j[d] = std::imag(std::conj(psi.value[0]) * psi.grad[d]) / kappa;
  }
  return j;
}

Vec3 real_vector(const std::array<double, 3>& v) { return {v[0], v[1], v[2]}; }

}  // namespace

// ---------------------------------------------------------------------------

template <typename T>
SystemBuilder<T>::SystemBuilder(int n, std::vector<char> constrained) : n_(n), constrained_(std::move(constrained))
{
  if (constrained_.empty()) {
    constrained_.assign(n, 0);
  }
  if (static_cast<int>(constrained_.size()) != n) {
    throw std::invalid_argument("SystemBuilder: constraint mask has wrong length");
  }
}

template <typename T>
void SystemBuilder<T>::begin(std::span<const T> bc)
{
  if (bc.empty()) {
    bc_.assign(n_, T{});
  } else if (static_cast<int>(bc.size()) == n_) {
    bc_.assign(bc.begin(), bc.end());
  } else {
    throw std::invalid_argument("SystemBuilder::begin: boundary values have wrong length");
  }
  system_.rhs.assign(n_, T{});
  if (recorded_) {
    std::fill(system_.matrix.values().begin(), system_.matrix.values().end(), T{});
    cursor_ = 0;
  } else {
    triplets_.clear();
  }
}

template <typename T>
void SystemBuilder<T>::add(int row, int col, T value)
{
  if (constrained_[row]) {
    return;
  }
  if (constrained_[col]) {
    system_.rhs[row] -= value * bc_[col];
    return;
  }
  if (recorded_) {
    system_.matrix.values()[positions_[cursor_++]] += value;
  } else {
    triplets_.push_back({row, col, value});
  }
}

template <typename T>
void SystemBuilder<T>::add_block(std::span<const int> rows, std::span<const int> cols, const T* block)
{
  const std::size_t nc = cols.size();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < nc; ++j) {
      add(rows[i], cols[j], block[i * nc + j]);
    }
  }
}

template <typename T>
const AssembledSystem<T>& SystemBuilder<T>::finish()
{
  system_.dirichlet_dofs.clear();
  system_.dirichlet_values.clear();
  for (int d = 0; d < n_; ++d) {
    if (!constrained_[d]) {
      continue;
    }
    if (recorded_) {
      system_.matrix.values()[positions_[cursor_++]] += T(1);
    } else {
      triplets_.push_back({d, d, T(1)});
    }
    system_.rhs[d] = bc_[d];
    system_.dirichlet_dofs.push_back(d);
    system_.dirichlet_values.push_back(bc_[d]);
  }
  if (recorded_) {
    if (cursor_ != positions_.size()) {
      throw std::logic_error("SystemBuilder: assembly sequence differs from the recorded pattern");
    }
  } else {
    system_.matrix = SparseMatrix<T>::from_triplets(n_, n_, triplets_, &positions_);
    triplets_.clear();
    triplets_.shrink_to_fit();
    recorded_ = true;
  }
  return system_;
}

template class SystemBuilder<double>;
template class SystemBuilder<Complex>;

// ---------------------------------------------------------------------------

int polynomial_degree(const DofMap& space)
{
  const SpaceDescriptor& d = space.descriptor();
  switch (d.family) {
    case Family::Lagrange:
    case Family::DiscontinuousLagrange:
      return d.degree;
    case Family::RaviartThomas:
      return d.degree + 1;
    case Family::NedelecFirstKind:
      return d.degree;
  }
  return d.degree;
}

int matrix_quadrature_degree(std::initializer_list<const DofMap*> spaces)
{
  int p = 0;
  for (const DofMap* s : spaces) {
    p = std::max(p, polynomial_degree(*s));
  }
  return 2 * p + 2;
}

int load_quadrature_degree(int dim) { return dim == 2 ? 6 : 5; }

ForcingLoads assemble_forcing_loads(const ManufacturedCase& mcase, const DofMap& psi_space, const DofMap& A_space,
                                    int degree)
{
  require_same_mesh(psi_space, A_space);
  const Mesh& mesh = psi_space.mesh();
  const QuadratureRule rule = rule_for(mesh, degree);
  BasisEvaluator ep(psi_space, rule);
  BasisEvaluator ea(A_space, rule);
  ForcingLoads out;
  for (auto& v : out.psi) {
    v.assign(psi_space.num_dofs(), Complex{});
  }
  for (auto& v : out.A) {
    v.assign(A_space.num_dofs(), 0.0);
  }
  out.curl_He.assign(A_space.num_dofs(), 0.0);
  out.He_curl.assign(A_space.num_dofs(), 0.0);

  for (int c = 0; c < mesh.num_cells(); ++c) {
    ep.reinit(c);
    ea.reinit(c);
    const BasisValues& bp = ep.values();
    const BasisValues& ba = ea.values();
    const auto pd = psi_space.cell_dofs(c);
    const auto ad = A_space.cell_dofs(c);
    for (int q = 0; q < bp.num_points; ++q) {
      const SpatialSample s = mcase.spatial(bp.points[q]);
      const double w = bp.JxW[q];
      const auto G = mcase.g_terms(s);
      const auto F = mcase.f_terms(s);
      for (int i = 0; i < bp.num_dofs; ++i) {
        const double phi = bp.value[q * bp.num_dofs + i][0];
        for (int k = 0; k < ManufacturedCase::kTerms; ++k) {
          out.psi[k][pd[i]] += w * phi * G[k];
        }
      }
      for (int i = 0; i < ba.num_dofs; ++i) {
        const Vec3& v = ba.value[q * ba.num_dofs + i];
        const Vec3& cv = ba.curl[q * ba.num_dofs + i];
        for (int k = 0; k < ManufacturedCase::kTerms; ++k) {
          out.A[k][ad[i]] += w * dot(F[k], v);
        }
        out.curl_He[ad[i]] += w * dot(s.curl_He, v);
        out.He_curl[ad[i]] += w * dot(s.He, cv);
      }
    }
  }
  return out;
}

std::vector<Complex> psi_forcing(const ManufacturedCase& mcase, const ForcingLoads& loads, double t)
{
  const auto c = mcase.g_coefficients(t);
  std::vector<Complex> out(loads.psi[0].size());
  for (int k = 0; k < ManufacturedCase::kTerms; ++k) {
    for (std::size_t i = 0; i < out.size(); ++i) {
      out[i] += c[k] * loads.psi[k][i];
    }
  }
  return out;
}

namespace {

std::vector<double> combine_A_forcing(const ManufacturedCase& mcase, const ForcingLoads& loads, double t,
                                      const std::vector<double>& boundary_term)
{
  const auto c = mcase.f_coefficients(t);
  const double h = mcase.He_factor(t);
  std::vector<double> out(boundary_term.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    double v = h * boundary_term[i];
    for (int k = 0; k < ManufacturedCase::kTerms; ++k) {
      v += c[k] * loads.A[k][i];
    }
    out[i] = v;
  }
  return out;
}

}  // namespace

std::vector<double> mixed_A_forcing(const ManufacturedCase& mcase, const ForcingLoads& loads, double t)
{
  return combine_A_forcing(mcase, loads, t, loads.curl_He);
}

std::vector<double> lagrange_A_forcing(const ManufacturedCase& mcase, const ForcingLoads& loads, double t)
{
  return combine_A_forcing(mcase, loads, t, loads.He_curl);
}

// ---------------------------------------------------------------------------

PsiAssembler::PsiAssembler(std::shared_ptr<const DofMap> psi_space, std::shared_ptr<const DofMap> A_space,
                           double kappa, bool lagrange_form)
    : psi_space_(std::move(psi_space)),
      A_space_(std::move(A_space)),
      kappa_(kappa),
      lagrange_form_(lagrange_form),
      degree_(matrix_quadrature_degree({psi_space_.get(), A_space_.get()})),
      builder_(psi_space_->num_dofs(), {})
{
  require_same_mesh(*psi_space_, *A_space_);
  if (psi_space_->descriptor().value_kind != ValueKind::ScalarComplex) {
    throw std::invalid_argument("PsiAssembler: psi space must be scalar complex");
  }
}

const AssembledSystem<Complex>& PsiAssembler::assemble(const ComplexFunction& psi_old, const RealFunction& A_old,
                                                       double tau, std::span<const Complex> forcing)
{
  if (psi_old.space != psi_space_ || A_old.space != A_space_) {
    throw std::invalid_argument("PsiAssembler: coefficient functions live on other spaces");
  }
  const Mesh& mesh = psi_space_->mesh();
  const QuadratureRule rule = rule_for(mesh, degree_);
  BasisEvaluator ep(*psi_space_, rule);
  BasisEvaluator ea(*A_space_, rule);
  const Complex I(0.0, 1.0);
  const double k = kappa_;
  const int nd = psi_space_->dofs_per_cell();
  std::vector<Complex> K(static_cast<std::size_t>(nd) * nd);
  std::vector<double> Ag(nd);

  builder_.begin({});
  for (int c = 0; c < mesh.num_cells(); ++c) {
    ep.reinit(c);
    ea.reinit(c);
    const BasisValues& bp = ep.values();
    const auto pd = psi_space_->cell_dofs(c);
    const auto ad = A_space_->cell_dofs(c);
    std::fill(K.begin(), K.end(), Complex{});
    for (int q = 0; q < bp.num_points; ++q) {
      const auto psi = evaluate_at(bp, pd, psi_old.coefficients, q);
      const auto A = evaluate_at(ea.values(), ad, A_old.coefficients, q);
      const Vec3 a = real_vector(A.value);
      const double a2 = dot(a, a);
      const double rho = std::norm(psi.value[0]);
      const double V = lagrange_form_ ? -(a2 + rho - 1.0) : rho - 1.0;
      const double w = bp.JxW[q];
      const Complex mass = w * (Complex(1.0 / tau + V + a2) - I * k * A.div);
      const std::size_t base = static_cast<std::size_t>(q) * nd;
      for (int i = 0; i < nd; ++i) {
        Ag[i] = dot(a, bp.grad[base + i]);
      }
      for (int i = 0; i < nd; ++i) {
        const double pi = bp.value[base + i][0];
        const Vec3& gi = bp.grad[base + i];
        builder_.add_rhs(pd[i], w / tau * psi.value[0] * pi);
        Complex* Ki = K.data() + static_cast<std::size_t>(i) * nd;
        for (int j = 0; j < nd; ++j) {
          const double pj = bp.value[base + j][0];
          const double stiff = dot(bp.grad[base + j], gi) / (k * k);
          Ki[j] += mass * (pj * pi) + w * stiff + (I * (w / k)) * (Ag[j] * pi - pj * Ag[i]);
        }
      }
    }
    builder_.add_block(pd, pd, K.data());
  }
  if (!forcing.empty()) {
    for (int i = 0; i < psi_space_->num_dofs(); ++i) {
      builder_.add_rhs(i, forcing[i]);
    }
  }
  return builder_.finish();
}

// ---------------------------------------------------------------------------

namespace {

std::vector<char> saddle_mask(const DofMap& sigma, const DofMap& A, bool essential)
{
  std::vector<char> mask = constraint_mask(sigma, essential);
  const auto am = constraint_mask(A, essential);
  mask.insert(mask.end(), am.begin(), am.end());
  return mask;
}

}  // namespace

SigmaAAssembler::SigmaAAssembler(std::shared_ptr<const DofMap> sigma_space, std::shared_ptr<const DofMap> A_space,
                                 std::shared_ptr<const DofMap> psi_space, double kappa, bool essential)
    : sigma_space_(std::move(sigma_space)),
      A_space_(std::move(A_space)),
      psi_space_(std::move(psi_space)),
      kappa_(kappa),
      degree_(matrix_quadrature_degree({sigma_space_.get(), A_space_.get(), psi_space_.get()})),
      builder_(sigma_space_->num_dofs() + A_space_->num_dofs(), saddle_mask(*sigma_space_, *A_space_, essential))
{
  require_same_mesh(*sigma_space_, *A_space_);
  require_same_mesh(*sigma_space_, *psi_space_);
  const int dim = sigma_space_->mesh().dim();
  const auto& sd = sigma_space_->descriptor();
  const auto& adesc = A_space_->descriptor();
  if (adesc.family != Family::RaviartThomas) {
    throw std::invalid_argument("SigmaAAssembler: A space must be Raviart-Thomas");
  }
  const bool sigma_ok = dim == 2 ? (sd.family == Family::Lagrange && sd.value_kind == ValueKind::ScalarReal)
                                 : sd.family == Family::NedelecFirstKind;
  if (!sigma_ok || sd.degree != adesc.degree + 1) {
    throw std::invalid_argument("SigmaAAssembler: sigma/A spaces must pair degree r+1 with RT_r");
  }
}

const AssembledSystem<double>& SigmaAAssembler::assemble(const ComplexFunction& psi_old, const RealFunction& A_old,
                                                         double tau, std::span<const double> sigma_bc,
                                                         std::span<const double> forcing)
{
  if (psi_old.space != psi_space_ || A_old.space != A_space_) {
    throw std::invalid_argument("SigmaAAssembler: coefficient functions live on other spaces");
  }
  const Mesh& mesh = A_space_->mesh();
  const QuadratureRule rule = rule_for(mesh, degree_);
  BasisEvaluator es(*sigma_space_, rule);
  BasisEvaluator ea(*A_space_, rule);
  BasisEvaluator ep(*psi_space_, rule);
  const int ns = sigma_space_->dofs_per_cell();
  const int na = A_space_->dofs_per_cell();
  const int nt = ns + na;
  const int offset = sigma_space_->num_dofs();
  std::vector<double> K(static_cast<std::size_t>(nt) * nt);
  std::vector<int> dofs(nt);

  std::vector<double> bc(static_cast<std::size_t>(builder_.size()), 0.0);
  if (!sigma_bc.empty()) {
    std::copy(sigma_bc.begin(), sigma_bc.end(), bc.begin());
  }
  builder_.begin(bc);
  for (int c = 0; c < mesh.num_cells(); ++c) {
    es.reinit(c);
    ea.reinit(c);
    ep.reinit(c);
    const BasisValues& bs = es.values();
    const BasisValues& ba = ea.values();
    const auto sdofs = sigma_space_->cell_dofs(c);
    const auto adofs = A_space_->cell_dofs(c);
    for (int i = 0; i < ns; ++i) {
      dofs[i] = sdofs[i];
    }
    for (int i = 0; i < na; ++i) {
      dofs[ns + i] = offset + adofs[i];
    }
    std::fill(K.begin(), K.end(), 0.0);
    for (int q = 0; q < bs.num_points; ++q) {
      const auto psi = evaluate_at(ep.values(), psi_space_->cell_dofs(c), psi_old.coefficients, q);
      const auto A = evaluate_at(ba, adofs, A_old.coefficients, q);
      const Vec3 a = real_vector(A.value);
      const Vec3 J = current_density(psi, kappa_);
      const double rho = std::norm(psi.value[0]);
      const double w = bs.JxW[q];
      const std::size_t sb = static_cast<std::size_t>(q) * ns;
      const std::size_t ab = static_cast<std::size_t>(q) * na;
      for (int i = 0; i < ns; ++i) {
        double* Ki = K.data() + static_cast<std::size_t>(i) * nt;
        for (int j = 0; j < ns; ++j) {
          Ki[j] += w * dot(bs.value[sb + j], bs.value[sb + i]);
        }
        for (int j = 0; j < na; ++j) {
          Ki[ns + j] -= w * dot(bs.curl[sb + i], ba.value[ab + j]);
        }
      }
      for (int i = 0; i < na; ++i) {
        const Vec3& vi = ba.value[ab + i];
        double* Ki = K.data() + static_cast<std::size_t>(ns + i) * nt;
        for (int j = 0; j < ns; ++j) {
          Ki[j] += w * dot(bs.curl[sb + j], vi);
        }
        for (int j = 0; j < na; ++j) {
          Ki[ns + j] += w * ((1.0 / tau + rho) * dot(ba.value[ab + j], vi) + ba.div[ab + j] * ba.div[ab + i]);
        }
        builder_.add_rhs(offset + adofs[i], w * (dot(a, vi) / tau + dot(J, vi)));
      }
    }
    builder_.add_block(dofs, dofs, K.data());
  }
  if (!forcing.empty()) {
    for (int i = 0; i < A_space_->num_dofs(); ++i) {
      builder_.add_rhs(offset + i, forcing[i]);
    }
  }
  return builder_.finish();
}

// ---------------------------------------------------------------------------

LagrangeAAssembler::LagrangeAAssembler(std::shared_ptr<const DofMap> A_space, std::shared_ptr<const DofMap> psi_space,
                                       double kappa, bool essential)
    : A_space_(std::move(A_space)),
      psi_space_(std::move(psi_space)),
      kappa_(kappa),
      degree_(matrix_quadrature_degree({A_space_.get(), psi_space_.get()})),
      builder_(A_space_->num_dofs(), constraint_mask(*A_space_, essential))
{
  require_same_mesh(*A_space_, *psi_space_);
  if (!A_space_->is_vector_lagrange()) {
    throw std::invalid_argument("LagrangeAAssembler: A space must be vector Lagrange");
  }
}

const AssembledSystem<double>& LagrangeAAssembler::assemble(const ComplexFunction& psi_old,
                                                            const RealFunction& A_old, double tau,
                                                            std::span<const double> forcing)
{
  if (psi_old.space != psi_space_ || A_old.space != A_space_) {
    throw std::invalid_argument("LagrangeAAssembler: coefficient functions live on other spaces");
  }
  const Mesh& mesh = A_space_->mesh();
  const QuadratureRule rule = rule_for(mesh, degree_);
  BasisEvaluator ea(*A_space_, rule);
  BasisEvaluator ep(*psi_space_, rule);
  const int na = A_space_->dofs_per_cell();
  std::vector<double> K(static_cast<std::size_t>(na) * na);

  builder_.begin({});
  for (int c = 0; c < mesh.num_cells(); ++c) {
    ea.reinit(c);
    ep.reinit(c);
    const BasisValues& ba = ea.values();
    const auto adofs = A_space_->cell_dofs(c);
    std::fill(K.begin(), K.end(), 0.0);
    for (int q = 0; q < ba.num_points; ++q) {
      const auto psi = evaluate_at(ep.values(), psi_space_->cell_dofs(c), psi_old.coefficients, q);
      const auto A = evaluate_at(ba, adofs, A_old.coefficients, q);
      const Vec3 a = real_vector(A.value);
      const Vec3 J = current_density(psi, kappa_);
      const double rho = std::norm(psi.value[0]);
      const double w = ba.JxW[q];
      const std::size_t ab = static_cast<std::size_t>(q) * na;
      for (int i = 0; i < na; ++i) {
        const Vec3& vi = ba.value[ab + i];
        double* Ki = K.data() + static_cast<std::size_t>(i) * na;
        for (int j = 0; j < na; ++j) {
          Ki[j] += w * ((1.0 / tau + rho) * dot(ba.value[ab + j], vi) + ba.div[ab + j] * ba.div[ab + i] +
                        dot(ba.curl[ab + j], ba.curl[ab + i]));
        }
        builder_.add_rhs(adofs[i], w * (dot(a, vi) / tau + dot(J, vi)));
      }
    }
    builder_.add_block(adofs, adofs, K.data());
  }
  if (!forcing.empty()) {
    for (int i = 0; i < A_space_->num_dofs(); ++i) {
      builder_.add_rhs(i, forcing[i]);
    }
  }
  return builder_.finish();
}

// ---------------------------------------------------------------------------

RealMatrix assemble_mass_matrix(const DofMap& space, int degree)
{
  const Mesh& mesh = space.mesh();
  BasisEvaluator ev(space, rule_for(mesh, degree));
  const int nd = space.dofs_per_cell();
  std::vector<Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(mesh.num_cells()) * nd * nd);
  std::vector<double> K(static_cast<std::size_t>(nd) * nd);
  for (int c = 0; c < mesh.num_cells(); ++c) {
    ev.reinit(c);
    const BasisValues& b = ev.values();
    std::fill(K.begin(), K.end(), 0.0);
    for (int q = 0; q < b.num_points; ++q) {
      for (int i = 0; i < nd; ++i) {
        for (int j = 0; j < nd; ++j) {
          K[i * nd + j] += b.JxW[q] * dot(b.value[q * nd + i], b.value[q * nd + j]);
        }
      }
    }
    const auto dofs = space.cell_dofs(c);
    for (int i = 0; i < nd; ++i) {
      for (int j = 0; j < nd; ++j) {
        trip.push_back({dofs[i], dofs[j], K[i * nd + j]});
      }
    }
  }
  return RealMatrix::from_triplets(space.num_dofs(), space.num_dofs(), trip);
}

double sigma_constraint_residual(const RealFunction& sigma, const RealFunction& A)
{
  const DofMap& ss = *sigma.space;
  const DofMap& as = *A.space;
  require_same_mesh(ss, as);
  const Mesh& mesh = ss.mesh();
  const QuadratureRule rule = rule_for(mesh, matrix_quadrature_degree({&ss, &as}));
  BasisEvaluator es(ss, rule);
  BasisEvaluator ea(as, rule);
  std::vector<double> r(ss.num_dofs(), 0.0);
  double ns2 = 0.0;
  double na2 = 0.0;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    es.reinit(c);
    ea.reinit(c);
    const BasisValues& bs = es.values();
    const auto sd = ss.cell_dofs(c);
    for (int q = 0; q < bs.num_points; ++q) {
      const auto s = evaluate_at(bs, sd, sigma.coefficients, q);
      const auto a = evaluate_at(ea.values(), as.cell_dofs(c), A.coefficients, q);
      const Vec3 sv = real_vector(s.value);
      const Vec3 av = real_vector(a.value);
      const double w = bs.JxW[q];
      ns2 += w * dot(sv, sv);
      na2 += w * dot(av, av);
      for (int i = 0; i < bs.num_dofs; ++i) {
        const std::size_t k = static_cast<std::size_t>(q) * bs.num_dofs + i;
        r[sd[i]] += w * (dot(sv, bs.value[k]) - dot(bs.curl[k], av));
      }
    }
  }
  double worst = 0.0;
  for (int i = 0; i < ss.num_dofs(); ++i) {
    if (!ss.is_boundary_dof(i)) {
      worst = std::max(worst, std::abs(r[i]));
    }
  }
  const double scale = std::max(std::sqrt(ns2), std::sqrt(na2));
  return scale > 0.0 ? worst / scale : worst;
}

std::vector<double> assemble_curl_load(const RealFunction& A, const DofMap& scalar_space, int degree)
{
  const DofMap& as = *A.space;
  require_same_mesh(as, scalar_space);
  if (as.mesh().dim() != 2 || scalar_space.value_size() != 1 || as.value_size() != 2) {
    throw std::invalid_argument("assemble_curl_load: needs a 2D vector field and a scalar space");
  }
  const Mesh& mesh = as.mesh();
  const QuadratureRule rule = rule_for(mesh, degree);
  BasisEvaluator ea(as, rule);
  BasisEvaluator es(scalar_space, rule);
  std::vector<double> b(scalar_space.num_dofs(), 0.0);
  for (int c = 0; c < mesh.num_cells(); ++c) {
    ea.reinit(c);
    es.reinit(c);
    const BasisValues& bs = es.values();
    const auto sd = scalar_space.cell_dofs(c);
    for (int q = 0; q < bs.num_points; ++q) {
      const auto a = evaluate_at(ea.values(), as.cell_dofs(c), A.coefficients, q);
      for (int i = 0; i < bs.num_dofs; ++i) {
        b[sd[i]] += bs.JxW[q] * a.curl[2] * bs.value[q * bs.num_dofs + i][0];
      }
    }
  }
  return b;
}

RealFunction project_curl(const RealFunction& A, std::shared_ptr<const DofMap> scalar_space)
{
  const int degree = matrix_quadrature_degree({A.space.get(), scalar_space.get()});
  const auto b = assemble_curl_load(A, *scalar_space, degree);
  const RealMatrix M = assemble_mass_matrix(*scalar_space, degree);
  RealFunction out(scalar_space);
  out.coefficients = lu_solve<double>(M, b);
  return out;
}

namespace {

template <typename T, typename Diff>
double l2_error_impl(const FeFunction<T>& f, int degree, Diff diff)
{
  const DofMap& space = *f.space;
  const Mesh& mesh = space.mesh();
  BasisEvaluator ev(space, rule_for(mesh, degree));
  double sum = 0.0;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    ev.reinit(c);
    const BasisValues& b = ev.values();
    const auto dofs = space.cell_dofs(c);
    for (int q = 0; q < b.num_points; ++q) {
      const auto v = evaluate_at(b, dofs, f.coefficients, q);
      sum += b.JxW[q] * diff(v, b.points[q]);
    }
  }
  return std::sqrt(sum);
}

}  // namespace

double l2_error(const RealFunction& f, const ScalarField& exact, int degree)
{
  return l2_error_impl(f, degree, [&](const FieldValue<double>& v, const Vec3& x) {
    const double d = v.value[0] - exact(x);
    return d * d;
  });
}

double l2_error(const ComplexFunction& f, const ComplexField& exact, int degree)
{
  return l2_error_impl(f, degree,
                       [&](const FieldValue<Complex>& v, const Vec3& x) { return std::norm(v.value[0] - exact(x)); });
}

double l2_error(const RealFunction& f, const VectorField& exact, int degree)
{
  return l2_error_impl(f, degree, [&](const FieldValue<double>& v, const Vec3& x) {
    const Vec3 d = real_vector(v.value) - exact(x);
    return dot(d, d);
  });
}

}  // namespace tdgl
