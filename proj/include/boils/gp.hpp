/*!
  \file gp.hpp
  \brief Exact Gaussian-process regression over sequences.

  Zero prior mean, normalised kernel, fixed diagonal jitter instead of a
  learned noise term. Hyperparameters are fitted by projected Adam on the
  negative log marginal likelihood

    J(theta) = 1/2 log det(K + jitter I) + 1/2 y^T (K + jitter I)^-1 y

  evaluated on standardised targets.
*/

#pragma once

#include "covariance.hpp"
#include "kernel.hpp"
#include "sequence.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace boils
{

class gp_error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

struct fit_config
{
  double learning_rate = 0.1;
  std::size_t steps = 60;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  std::size_t restarts = 1;
  double jitter = 1e-6;
  std::uint64_t seed = 0; /* draws the starting points of restarts beyond the first */

  void validate() const
  {
    if ( !( learning_rate > 0.0 ) )
      throw std::invalid_argument( "fit_config: learning_rate must be positive" );
    if ( restarts < 1 )
      throw std::invalid_argument( "fit_config: restarts must be >= 1" );
    if ( !( jitter >= 0.0 ) )
      throw std::invalid_argument( "fit_config: jitter must be non-negative" );
  }
};

inline constexpr double max_jitter = 1e-2;

struct nll_result
{
  double value;
  double jitter; /* jitter actually used after escalation */
};

namespace detail
{

/* Cholesky of K + jitter I, escalating jitter x10 up to max_jitter */
inline std::pair<Eigen::LLT<Eigen::MatrixXd>, double> factorize( Eigen::MatrixXd k, double jitter )
{
  double j = jitter;
  while ( true )
  {
    Eigen::MatrixXd kj = k;
    kj.diagonal().array() += j;
    Eigen::LLT<Eigen::MatrixXd> llt( kj );
    if ( llt.info() == Eigen::Success )
    {
      const auto& l = llt.matrixLLT();
      bool ok = true;
      for ( Eigen::Index i = 0; i < l.rows() && ok; ++i )
        ok = std::isfinite( l( i, i ) ) && l( i, i ) > 0.0;
      if ( ok )
        return { std::move( llt ), j };
    }
    if ( j >= max_jitter )
      throw gp_error( "gp: covariance factorisation failed up to jitter " + std::to_string( max_jitter ) );
    j = j > 0.0 ? std::min( j * 10.0, max_jitter ) : 1e-10;
  }
}

inline double nll_from_factor( Eigen::LLT<Eigen::MatrixXd> const& llt, Eigen::VectorXd const& y )
{
  const auto& l = llt.matrixLLT();
  double logdet = 0.0;
  for ( Eigen::Index i = 0; i < l.rows(); ++i )
    logdet += std::log( l( i, i ) );
  const Eigen::VectorXd v = llt.matrixL().solve( y );
  return logdet + 0.5 * v.squaredNorm();
}

} // namespace detail

/*! \brief Negative log marginal likelihood from a Gram matrix. */
inline nll_result nll_from_gram( Eigen::MatrixXd const& k, Eigen::VectorXd const& y, double jitter )
{
  if ( k.rows() == 0 || k.rows() != y.size() )
    throw std::domain_error( "nll: size mismatch or empty training set" );
  auto [llt, used] = detail::factorize( k, jitter );
  const double value = detail::nll_from_factor( llt, y );
  if ( !std::isfinite( value ) )
    throw gp_error( "nll: non-finite value" );
  return { value, used };
}

/*! \brief NLL of the normalised SSK Gram on standardised targets. */
inline nll_result nll( std::span<const sequence> xs, Eigen::VectorXd const& y, ssk_params const& p, double jitter )
{
  return nll_from_gram( gram( xs, p ), y, jitter );
}

struct standardization
{
  double mean = 0.0;
  double std = 1.0;
};

/* population statistics; std falls back to 1 for constant or single targets */
inline standardization standardize( std::span<const double> y )
{
  standardization s;
  if ( y.empty() )
    return s;
  double sum = 0.0;
  for ( auto v : y )
    sum += v;
  s.mean = sum / static_cast<double>( y.size() );
  double ss = 0.0;
  for ( auto v : y )
    ss += ( v - s.mean ) * ( v - s.mean );
  const double sd = std::sqrt( ss / static_cast<double>( y.size() ) );
  s.std = ( y.size() >= 2 && sd > 1e-12 * std::max( 1.0, std::abs( s.mean ) ) ) ? sd : 1.0;
  return s;
}

struct fit_step
{
  std::vector<double> params;
  double nll;
};

template<typename Covariance>
struct gp_model
{
  using params_type = typename Covariance::params_type;

  Covariance covariance;
  params_type params;
  std::vector<sequence> train_x{};
  Eigen::VectorXd train_y_raw{};
  standardization scaling{};
  double jitter = 0.0;
  double nll = std::numeric_limits<double>::quiet_NaN();

  Eigen::MatrixXd chol{}; /* lower factor of K + jitter I */
  Eigen::VectorXd alpha{};
  typename Covariance::predictor predictor{};

  std::vector<fit_step> trace{}; /* every Adam iterate, starting point first */

  std::size_t size() const noexcept { return train_x.size(); }
};

/*! \brief Builds the cached factorisation for fixed hyperparameters. */
template<typename Covariance>
gp_model<Covariance> condition( Covariance cov, std::span<const sequence> xs, std::span<const double> y_raw,
                                typename Covariance::params_type const& params, double jitter )
{
  if ( xs.empty() || xs.size() != y_raw.size() )
    throw std::domain_error( "gp: training inputs and targets must be non-empty and aligned" );

  gp_model<Covariance> m{ .covariance = std::move( cov ), .params = params };
  m.train_x.assign( xs.begin(), xs.end() );
  m.train_y_raw = Eigen::Map<const Eigen::VectorXd>( y_raw.data(), static_cast<Eigen::Index>( y_raw.size() ) );
  m.scaling = standardize( y_raw );
  const Eigen::VectorXd y = ( m.train_y_raw.array() - m.scaling.mean ) / m.scaling.std;

  auto ev = m.covariance.prepare_gram( m.train_x );
  auto [llt, used] = detail::factorize( ev( params ), jitter );
  m.jitter = used;
  m.nll = detail::nll_from_factor( llt, y );
  m.chol = llt.matrixL();
  m.alpha = llt.solve( y );
  m.predictor = m.covariance.prepare_predictor( m.train_x, params );
  return m;
}

/*! \brief Fits hyperparameters by projected Adam and returns the best-seen model. */
template<typename Covariance>
gp_model<Covariance> fit( Covariance cov, std::span<const sequence> xs, std::span<const double> y_raw,
                          typename Covariance::params_type const& init, fit_config const& cfg )
{
  using params_type = typename Covariance::params_type;
  cfg.validate();
  if ( xs.empty() || xs.size() != y_raw.size() )
    throw std::domain_error( "gp: training inputs and targets must be non-empty and aligned" );

  const auto scaling = standardize( y_raw );
  Eigen::VectorXd y( static_cast<Eigen::Index>( y_raw.size() ) );
  for ( std::size_t i = 0; i < y_raw.size(); ++i )
    y( static_cast<Eigen::Index>( i ) ) = ( y_raw[i] - scaling.mean ) / scaling.std;

  const auto ev = cov.prepare_gram( xs );
  auto objective = [&]( params_type const& p ) {
    try
    {
      return nll_from_gram( ev( p ), y, cfg.jitter ).value;
    }
    catch ( std::exception const& )
    {
      return std::numeric_limits<double>::infinity();
    }
  };

  rng restart_rng( cfg.seed );
  std::optional<params_type> best;
  double best_value = std::numeric_limits<double>::infinity();
  std::vector<fit_step> trace;

  for ( std::size_t r = 0; r < cfg.restarts; ++r )
  {
    auto x = Covariance::to_vector( r == 0 ? init : Covariance::sample_params( restart_rng, init ) );
    std::vector<double> m1( x.size(), 0.0 ), m2( x.size(), 0.0 );

    auto record = [&]( std::vector<double> const& v ) {
      const auto p = Covariance::from_vector( v, init );
      const double f = objective( p );
      trace.push_back( { v, f } );
      if ( f < best_value )
      {
        best_value = f;
        best = p;
      }
      return f;
    };

    if ( !std::isfinite( record( x ) ) )
      continue;
    for ( std::size_t t = 1; t <= cfg.steps; ++t )
    {
      std::vector<double> g;
      try
      {
        g = cov.nll_gradient( ev, Covariance::from_vector( x, init ), y, cfg.jitter, objective );
      }
      catch ( std::exception const& )
      {
        break;
      }
      const double c1 = 1.0 - std::pow( cfg.adam_beta1, static_cast<double>( t ) );
      const double c2 = 1.0 - std::pow( cfg.adam_beta2, static_cast<double>( t ) );
      for ( std::size_t i = 0; i < x.size(); ++i )
      {
        m1[i] = cfg.adam_beta1 * m1[i] + ( 1.0 - cfg.adam_beta1 ) * g[i];
        m2[i] = cfg.adam_beta2 * m2[i] + ( 1.0 - cfg.adam_beta2 ) * g[i] * g[i];
        x[i] -= cfg.learning_rate * ( m1[i] / c1 ) / ( std::sqrt( m2[i] / c2 ) + cfg.adam_eps );
      }
      Covariance::project( x );
      if ( !std::isfinite( record( x ) ) )
        break;
    }
  }

  if ( !best )
    throw gp_error( "gp fit: every restart failed to factorise the covariance" );

  auto model = condition( std::move( cov ), xs, y_raw, *best, cfg.jitter );
  model.trace = std::move( trace );
  return model;
}

/*! \brief Posterior mean and variance at one sequence, de-standardised.

  Returns the unclamped variance; callers clamp.
*/
template<typename Covariance>
std::pair<double, double> posterior_point( gp_model<Covariance> const& m, sequence const& x )
{
  const Eigen::VectorXd ks = m.predictor.cross( x );
  const double mean = ks.dot( m.alpha );
  const Eigen::VectorXd v = m.chol.template triangularView<Eigen::Lower>().solve( ks );
  const double var = m.predictor.prior_variance( x ) - v.squaredNorm();
  return { mean * m.scaling.std + m.scaling.mean, var * m.scaling.std * m.scaling.std };
}

struct posterior_result
{
  Eigen::VectorXd means;
  Eigen::VectorXd variances;
};

template<typename Covariance>
posterior_result posterior( gp_model<Covariance> const& m, std::span<const sequence> test, bool clamp = true )
{
  posterior_result r{ Eigen::VectorXd( static_cast<Eigen::Index>( test.size() ) ),
                      Eigen::VectorXd( static_cast<Eigen::Index>( test.size() ) ) };
  for ( std::size_t i = 0; i < test.size(); ++i )
  {
    auto [mu, var] = posterior_point( m, test[i] );
    r.means( static_cast<Eigen::Index>( i ) ) = mu;
    r.variances( static_cast<Eigen::Index>( i ) ) = clamp ? std::max( var, 0.0 ) : var;
  }
  return r;
}

} // namespace boils
