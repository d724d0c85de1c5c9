/*!
  \file covariance.hpp
  \brief Kernel adaptors used by the Gaussian process.

  A covariance type `C` provides:

    - `C::params_type`, `to_vector`, `from_vector`, `project` for the
      hyperparameter optimiser;
    - `prepare_gram(xs)` returning an evaluator `params -> Gram matrix`
      that amortises all parameter-independent work for a fixed input set;
    - `prepare_predictor(xs, params)` returning an object computing the
      cross-covariance vector k(xs, x) for one test sequence;
    - `nll_gradient(evaluator, params, y, jitter, nll)`.

  Both kernels are normalised, so the prior variance is 1 everywhere.
*/

#pragma once

#include "kernel.hpp"
#include "sequence.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <mutex>
#include <span>
#include <unordered_map>
#include <vector>

namespace boils
{

namespace detail
{

/*! \brief SSK order sums as polynomials in theta_g.

  Same recurrence as `ssk_order_sums`, carried out on coefficient vectors.
  Result layout: coefficient of theta_g^g for order n at [(n - 1) * width + g]
  with width = |a| + |b| - 1.
*/
inline std::vector<double> ssk_order_polynomials( std::span<const symbol> a, std::span<const symbol> b,
                                                  std::size_t max_order )
{
  const auto la = a.size();
  const auto lb = b.size();
  const auto width = la + lb - 1;
  std::vector<double> out( max_order * width, 0.0 );
  if ( la == 0 || lb == 0 )
    return out;

  const auto cells = la * lb;
  thread_local std::vector<double> e, r, h;
  e.assign( cells * width, 0.0 );
  r.assign( cells * width, 0.0 );
  h.assign( cells * width, 0.0 );
  auto at = [&]( std::vector<double>& v, std::size_t p, std::size_t q ) { return v.data() + ( p * lb + q ) * width; };

  for ( std::size_t p = 0; p < la; ++p )
    for ( std::size_t q = 0; q < lb; ++q )
      at( e, p, q )[0] = a[p] == b[q] ? 1.0 : 0.0;

  /* highest degree that can be non-zero at the current order */
  std::size_t degree = 0;
  for ( std::size_t n = 0; n < max_order; ++n )
  {
    bool any = false;
    double* dst = out.data() + n * width;
    for ( std::size_t c = 0; c < cells; ++c )
      for ( std::size_t g = 0; g <= degree; ++g )
      {
        dst[g] += e[c * width + g];
        any |= e[c * width + g] != 0.0;
      }
    if ( n + 1 == max_order || !any )
      break;

    const auto next_degree = std::min( width - 1, degree + la + lb );
    for ( std::size_t p = 0; p < la; ++p )
      for ( std::size_t q = 0; q < lb; ++q )
      {
        auto* rr = at( r, p, q );
        auto const* ee = at( e, p, q );
        std::fill( rr, rr + next_degree + 1, 0.0 );
        for ( std::size_t g = 0; g <= degree; ++g )
          rr[g] = ee[g];
        if ( q > 0 )
        {
          auto const* left = at( r, p, q - 1 );
          for ( std::size_t g = 0; g < next_degree; ++g )
            rr[g + 1] += left[g];
        }
      }
    for ( std::size_t q = 0; q < lb; ++q )
      for ( std::size_t p = 0; p < la; ++p )
      {
        auto* hh = at( h, p, q );
        auto const* rr = at( r, p, q );
        std::copy( rr, rr + next_degree + 1, hh );
        if ( p > 0 )
        {
          auto const* up = at( h, p - 1, q );
          for ( std::size_t g = 0; g < next_degree; ++g )
            hh[g + 1] += up[g];
        }
      }
    for ( std::size_t p = 0; p < la; ++p )
      for ( std::size_t q = 0; q < lb; ++q )
      {
        auto* ee = at( e, p, q );
        if ( p > 0 && q > 0 && a[p] == b[q] )
        {
          auto const* hh = at( h, p - 1, q - 1 );
          std::copy( hh, hh + next_degree + 1, ee );
        }
        else
          std::fill( ee, ee + next_degree + 1, 0.0 );
      }
    degree = next_degree;
  }
  return out;
}

/* weights theta_m^(2(n-1)) * theta_g^g matching the polynomial layout (reduced form) */
inline Eigen::VectorXd ssk_polynomial_weights( ssk_params const& p, std::size_t width )
{
  Eigen::VectorXd w( static_cast<Eigen::Index>( p.max_order * width ) );
  double order_scale = 1.0;
  for ( std::size_t n = 0; n < p.max_order; ++n )
  {
    double gp = 1.0;
    for ( std::size_t g = 0; g < width; ++g )
    {
      w( static_cast<Eigen::Index>( n * width + g ) ) = order_scale * gp;
      gp *= p.theta_g;
    }
    order_scale *= p.theta_m * p.theta_m;
  }
  return w;
}

inline std::size_t ssk_feature_dimension( std::size_t alphabet_size, std::size_t max_order )
{
  std::size_t dim = 0, block = 1;
  for ( std::size_t n = 1; n <= max_order; ++n )
  {
    block *= alphabet_size;
    dim += block;
    if ( dim > ( std::size_t{ 1 } << 20 ) )
      return dim;
  }
  return dim;
}

/*! \brief Explicit SSK embedding in the reduced form.

  phi_u(s) = theta_m^(|u| - 1) sum_i theta_g^gap(u, i); the reduced kernel is
  phi(a) . phi(b). Features of order n are stored at offset sum_{m < n} A^m
  with u read as a base-A number.
*/
inline void ssk_features( std::span<const symbol> s, ssk_params const& p, std::size_t alphabet_size,
                          Eigen::Ref<Eigen::VectorXd> out )
{
  out.setZero();
  const auto len = s.size();
  thread_local std::vector<double> gap_pow;
  gap_pow.resize( len + 1 );
  gap_pow[0] = 1.0;
  for ( std::size_t g = 1; g <= len; ++g )
    gap_pow[g] = gap_pow[g - 1] * p.theta_g;

  std::vector<std::size_t> offsets( p.max_order + 1, 0 );
  std::size_t block = 1;
  for ( std::size_t n = 2; n <= p.max_order; ++n )
  {
    block *= alphabet_size;
    offsets[n] = offsets[n - 1] + block;
  }
  std::vector<double> order_scale( p.max_order + 1, 1.0 );
  for ( std::size_t n = 2; n <= p.max_order; ++n )
    order_scale[n] = order_scale[n - 1] * p.theta_m;

  /* enumerate (first, last, id) over all tuples; first index is fixed at the root */
  struct frame
  {
    std::size_t last, order, id;
  };
  thread_local std::vector<frame> stack;
  for ( std::size_t first = 0; first < len; ++first )
  {
    stack.clear();
    stack.push_back( { first, 1, s[first] } );
    while ( !stack.empty() )
    {
      auto f = stack.back();
      stack.pop_back();
      out( static_cast<Eigen::Index>( offsets[f.order] + f.id ) ) +=
          order_scale[f.order] * gap_pow[f.last - first + 1 - f.order];
      if ( f.order == p.max_order )
        continue;
      for ( auto nxt = f.last + 1; nxt < len; ++nxt )
        stack.push_back( { nxt, f.order + 1, f.id * alphabet_size + s[nxt] } );
    }
  }
}

} // namespace detail

/*! \brief Memo of SSK pair polynomials keyed by sequence content.

  Parameter independent, so one cache serves a whole optimisation run;
  with the training set growing by one sequence per round only the new
  row of pairs is computed.
*/
class ssk_pair_cache
{
public:
  explicit ssk_pair_cache( std::size_t max_order ) : max_order_( max_order ) {}

  std::size_t max_order() const noexcept { return max_order_; }

  std::vector<double> const& get( sequence const& a, sequence const& b )
  {
    std::lock_guard lock( mutex_ );
    auto ia = id_of( a );
    auto ib = id_of( b );
    if ( ia > ib )
      std::swap( ia, ib );
    auto key = ( static_cast<std::uint64_t>( ia ) << 32 ) | ib;
    auto it = pairs_.find( key );
    if ( it == pairs_.end() )
      it = pairs_.emplace( key, detail::ssk_order_polynomials( a, b, max_order_ ) ).first;
    return it->second;
  }

  std::size_t size() const noexcept { return pairs_.size(); }

private:
  std::uint32_t id_of( sequence const& s )
  {
    auto [it, inserted] = ids_.emplace( s, static_cast<std::uint32_t>( ids_.size() ) );
    return it->second;
  }

  std::size_t max_order_;
  std::mutex mutex_;
  std::unordered_map<sequence, std::uint32_t, sequence_hash> ids_;
  std::unordered_map<std::uint64_t, std::vector<double>> pairs_;
};

/*! \brief Normalised SSK covariance over (theta_m, theta_g). */
class ssk_covariance
{
public:
  using params_type = ssk_params;

  ssk_covariance( std::size_t alphabet_size, std::size_t max_order, std::shared_ptr<ssk_pair_cache> cache = nullptr )
      : alphabet_size_( alphabet_size ), max_order_( max_order ), cache_( std::move( cache ) )
  {
    if ( !cache_ )
      cache_ = std::make_shared<ssk_pair_cache>( max_order );
    if ( cache_->max_order() != max_order )
      throw std::invalid_argument( "ssk_covariance: cache built for another order" );
  }

  static std::vector<double> to_vector( ssk_params const& p ) { return { p.theta_m, p.theta_g }; }
  static ssk_params from_vector( std::span<const double> v, ssk_params const& like )
  {
    auto p = like;
    p.theta_m = v[0];
    p.theta_g = v[1];
    return p;
  }
  static void project( std::vector<double>& v )
  {
    for ( auto& x : v )
      x = std::clamp( x, 0.0, 1.0 );
  }
  static ssk_params sample_params( rng& gen, ssk_params const& like )
  {
    auto p = like;
    p.theta_m = gen.uniform_real();
    p.theta_g = gen.uniform_real();
    return p;
  }

  class gram_evaluator
  {
  public:
    gram_evaluator() = default;

    Eigen::MatrixXd operator()( ssk_params const& p ) const
    {
      const auto w = detail::ssk_polynomial_weights( p, width_ );
      const Eigen::VectorXd v = coefs_ * w;
      Eigen::MatrixXd k( n_, n_ );
      Eigen::VectorXd inv_sqrt( n_ );
      Eigen::Index row = 0;
      for ( Eigen::Index i = 0; i < n_; ++i )
        for ( Eigen::Index j = 0; j <= i; ++j, ++row )
          k( i, j ) = v( row );
      for ( Eigen::Index i = 0; i < n_; ++i )
      {
        if ( !( k( i, i ) > 0.0 ) )
          throw std::domain_error( "ssk gram: zero self-similarity" );
        inv_sqrt( i ) = 1.0 / std::sqrt( k( i, i ) );
      }
      for ( Eigen::Index i = 0; i < n_; ++i )
      {
        for ( Eigen::Index j = 0; j < i; ++j )
          k( j, i ) = k( i, j ) = k( i, j ) * inv_sqrt( i ) * inv_sqrt( j );
        k( i, i ) = 1.0;
      }
      return k;
    }

    Eigen::Index size() const noexcept { return n_; }

  private:
    friend class ssk_covariance;
    Eigen::Index n_ = 0;
    std::size_t width_ = 0;
    Eigen::MatrixXd coefs_; /* one row per lower-triangular pair (i, j <= i) */
  };

  gram_evaluator prepare_gram( std::span<const sequence> xs ) const
  {
    gram_evaluator ev;
    ev.n_ = static_cast<Eigen::Index>( xs.size() );
    std::size_t max_len = 0;
    for ( auto const& x : xs )
      max_len = std::max( max_len, x.size() );
    ev.width_ = max_len == 0 ? 1 : 2 * max_len - 1;
    ev.coefs_.setZero( ev.n_ * ( ev.n_ + 1 ) / 2, static_cast<Eigen::Index>( max_order_ * ev.width_ ) );
    Eigen::Index row = 0;
    for ( std::size_t i = 0; i < xs.size(); ++i )
      for ( std::size_t j = 0; j <= i; ++j, ++row )
      {
        auto const& poly = cache_->get( xs[i], xs[j] );
        const auto w = xs[i].size() + xs[j].size() - 1;
        for ( std::size_t n = 0; n < max_order_; ++n )
          for ( std::size_t g = 0; g < w; ++g )
            ev.coefs_( row, static_cast<Eigen::Index>( n * ev.width_ + g ) ) = poly[n * w + g];
      }
    return ev;
  }

  class predictor
  {
  public:
    Eigen::VectorXd cross( sequence const& x ) const
    {
      if ( use_features_ )
      {
        thread_local Eigen::VectorXd phi;
        phi.resize( features_.cols() );
        detail::ssk_features( x, params_, alphabet_size_, phi );
        const auto norm = phi.norm();
        if ( !( norm > 0.0 ) )
          throw std::domain_error( "ssk predictor: zero self-similarity" );
        return features_ * ( phi / norm );
      }
      Eigen::VectorXd out( static_cast<Eigen::Index>( train_.size() ) );
      const auto self = detail::ssk_reduced( x, x, params_ );
      if ( !( self > 0.0 ) )
        throw std::domain_error( "ssk predictor: zero self-similarity" );
      for ( std::size_t i = 0; i < train_.size(); ++i )
        out( static_cast<Eigen::Index>( i ) ) =
            detail::ssk_reduced( x, train_[i], params_ ) / std::sqrt( self * train_self_[i] );
      return out;
    }

    double prior_variance( sequence const& ) const { return 1.0; }

  private:
    friend class ssk_covariance;
    ssk_params params_;
    std::size_t alphabet_size_ = 0;
    bool use_features_ = false;
    Eigen::MatrixXd features_; /* normalised embeddings of the training set, one per row */
    std::vector<sequence> train_;
    std::vector<double> train_self_;
  };

  predictor prepare_predictor( std::span<const sequence> xs, ssk_params const& p ) const
  {
    predictor pr;
    pr.params_ = p;
    pr.params_.max_order = max_order_;
    pr.alphabet_size_ = alphabet_size_;
    const auto dim = detail::ssk_feature_dimension( alphabet_size_, max_order_ );
    pr.use_features_ = dim <= ( std::size_t{ 1 } << 16 );
    if ( pr.use_features_ )
    {
      pr.features_.resize( static_cast<Eigen::Index>( xs.size() ), static_cast<Eigen::Index>( dim ) );
      Eigen::VectorXd phi( static_cast<Eigen::Index>( dim ) );
      for ( std::size_t i = 0; i < xs.size(); ++i )
      {
        detail::ssk_features( xs[i], pr.params_, alphabet_size_, phi );
        const auto norm = phi.norm();
        if ( !( norm > 0.0 ) )
          throw std::domain_error( "ssk predictor: zero self-similarity" );
        pr.features_.row( static_cast<Eigen::Index>( i ) ) = phi.transpose() / norm;
      }
    }
    else
    {
      pr.train_.assign( xs.begin(), xs.end() );
      for ( auto const& x : xs )
        pr.train_self_.push_back( detail::ssk_reduced( x, x, pr.params_ ) );
    }
    return pr;
  }

  template<typename Nll>
  std::vector<double> nll_gradient( gram_evaluator const&, ssk_params const& p, Eigen::VectorXd const&, double,
                                    Nll&& nll ) const
  {
    auto g = kernel_param_gradient( p, nll );
    return { g[0], g[1] };
  }

  std::size_t alphabet_size() const noexcept { return alphabet_size_; }
  std::size_t max_order() const noexcept { return max_order_; }

private:
  std::size_t alphabet_size_;
  std::size_t max_order_;
  std::shared_ptr<ssk_pair_cache> cache_;
};

/*! \brief Positional overlap covariance with one lengthscale per position.

  Gradients are analytic:
    dJ/dl_i = 1/2 sum_jk (K^-1 - alpha alpha^T)_jk K_jk [x_j,i != x_k,i] / (L l_i^2)
*/
class overlap_covariance
{
public:
  using params_type = overlap_params;

  static constexpr double min_lengthscale = 1e-3;
  static constexpr double max_lengthscale = 1e3;

  static std::vector<double> to_vector( overlap_params const& p ) { return p.lengthscales; }
  static overlap_params from_vector( std::span<const double> v, overlap_params const& ) { return { { v.begin(), v.end() } }; }
  static void project( std::vector<double>& v )
  {
    for ( auto& x : v )
      x = std::clamp( x, min_lengthscale, max_lengthscale );
  }
  /* log-uniform in [0.1, 10] per position */
  static overlap_params sample_params( rng& gen, overlap_params const& like )
  {
    auto p = like;
    for ( auto& l : p.lengthscales )
      l = std::exp( std::log( 10.0 ) * ( 2.0 * gen.uniform_real() - 1.0 ) );
    return p;
  }

  class gram_evaluator
  {
  public:
    Eigen::MatrixXd operator()( overlap_params const& p ) const
    {
      if ( static_cast<Eigen::Index>( p.lengthscales.size() ) != mismatch_.cols() )
        throw std::domain_error( "overlap gram: lengthscale count mismatch" );
      Eigen::VectorXd inv( mismatch_.cols() );
      for ( Eigen::Index i = 0; i < inv.size(); ++i )
        inv( i ) = 1.0 / p.lengthscales[static_cast<std::size_t>( i )];
      const Eigen::VectorXd dist = mismatch_ * inv;
      const double scale = inv.size() > 0 ? 1.0 / static_cast<double>( inv.size() ) : 0.0;
      Eigen::MatrixXd k( n_, n_ );
      Eigen::Index row = 0;
      for ( Eigen::Index i = 0; i < n_; ++i )
        for ( Eigen::Index j = 0; j <= i; ++j, ++row )
          k( i, j ) = k( j, i ) = std::exp( -scale * dist( row ) );
      return k;
    }

    Eigen::Index size() const noexcept { return n_; }

  private:
    friend class overlap_covariance;
    Eigen::Index n_ = 0;
    Eigen::MatrixXd mismatch_; /* one row per lower-triangular pair */
  };

  gram_evaluator prepare_gram( std::span<const sequence> xs ) const
  {
    gram_evaluator ev;
    ev.n_ = static_cast<Eigen::Index>( xs.size() );
    const auto k = xs.empty() ? 0 : xs[0].size();
    ev.mismatch_.setZero( ev.n_ * ( ev.n_ + 1 ) / 2, static_cast<Eigen::Index>( k ) );
    Eigen::Index row = 0;
    for ( std::size_t i = 0; i < xs.size(); ++i )
      for ( std::size_t j = 0; j <= i; ++j, ++row )
      {
        if ( xs[i].size() != k || xs[j].size() != k )
          throw std::domain_error( "overlap gram: length mismatch" );
        for ( std::size_t c = 0; c < k; ++c )
          ev.mismatch_( row, static_cast<Eigen::Index>( c ) ) = xs[i][c] != xs[j][c] ? 1.0 : 0.0;
      }
    return ev;
  }

  class predictor
  {
  public:
    Eigen::VectorXd cross( sequence const& x ) const
    {
      Eigen::VectorXd out( static_cast<Eigen::Index>( train_.size() ) );
      for ( std::size_t i = 0; i < train_.size(); ++i )
        out( static_cast<Eigen::Index>( i ) ) = overlap_value( x, train_[i], params_ );
      return out;
    }

    double prior_variance( sequence const& ) const { return 1.0; }

  private:
    friend class overlap_covariance;
    overlap_params params_;
    std::vector<sequence> train_;
  };

  predictor prepare_predictor( std::span<const sequence> xs, overlap_params const& p ) const
  {
    predictor pr;
    pr.params_ = p;
    pr.train_.assign( xs.begin(), xs.end() );
    return pr;
  }

  template<typename Nll>
  std::vector<double> nll_gradient( gram_evaluator const& ev, overlap_params const& p, Eigen::VectorXd const& y,
                                    double jitter, Nll&& ) const
  {
    const auto n = ev.n_;
    Eigen::MatrixXd k = ev( p );
    k.diagonal().array() += jitter;
    Eigen::LLT<Eigen::MatrixXd> llt( k );
    if ( llt.info() != Eigen::Success )
      throw std::runtime_error( "overlap gradient: factorisation failed" );
    const Eigen::VectorXd alpha = llt.solve( y );
    Eigen::MatrixXd w = llt.solve( Eigen::MatrixXd::Identity( n, n ) );
    w.noalias() -= alpha * alpha.transpose();
    k.diagonal().array() -= jitter;

    /* pairwise weights W_jk K_jk, off-diagonal pairs counted twice */
    Eigen::VectorXd pair_weight( ev.mismatch_.rows() );
    Eigen::Index row = 0;
    for ( Eigen::Index i = 0; i < n; ++i )
      for ( Eigen::Index j = 0; j <= i; ++j, ++row )
        pair_weight( row ) = ( i == j ? 1.0 : 2.0 ) * w( i, j ) * k( i, j );
    const Eigen::VectorXd s = ev.mismatch_.transpose() * pair_weight;
    const double len = static_cast<double>( p.lengthscales.size() );
    std::vector<double> grad( p.lengthscales.size() );
    for ( std::size_t c = 0; c < grad.size(); ++c )
    {
      const auto l = p.lengthscales[c];
      grad[c] = 0.5 * s( static_cast<Eigen::Index>( c ) ) / ( len * l * l );
    }
    return grad;
  }
};

} // namespace boils
