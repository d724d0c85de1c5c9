/*!
  \file kernel.hpp
  \brief Sub-sequence string kernel (SSK) and a positional overlap kernel
         over operation sequences.

  The SSK between two strings sums, over every sub-sequence u of length
  1..max_order, the product of the contributions

    c_u(s) = theta_m^|u| * sum_{i_1 < ... < i_|u|, s_i = u} theta_g^(i_|u| - i_1 + 1 - |u|)

  so theta_m down-weights long sub-sequences and theta_g down-weights
  sub-sequences whose matched positions are spread out.
*/

#pragma once

#include "sequence.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace boils
{

struct ssk_params
{
  double theta_m = 0.5;
  double theta_g = 0.5;
  std::size_t max_order = 3;

  void validate() const
  {
    if ( !( theta_m >= 0.0 && theta_m <= 1.0 ) || !( theta_g >= 0.0 && theta_g <= 1.0 ) )
      throw std::domain_error( "ssk_params: decays must lie in [0, 1]" );
    if ( max_order < 1 )
      throw std::domain_error( "ssk_params: max_order must be >= 1" );
  }

  bool operator==( ssk_params const& ) const = default;
};

struct overlap_params
{
  std::vector<double> lengthscales;

  void validate() const
  {
    for ( auto l : lengthscales )
      if ( !( l > 0.0 ) || !std::isfinite( l ) )
        throw std::domain_error( "overlap_params: lengthscales must be positive" );
  }

  bool operator==( overlap_params const& ) const = default;
};

/*! \brief Exact contribution c_u(s) by enumerating every increasing index tuple.

  Exponential in |u|; intended as a reference for tests and small inputs.
*/
inline double ssk_contribution_bruteforce( std::span<const symbol> u, std::span<const symbol> s, ssk_params const& p )
{
  p.validate();
  const auto n = u.size();
  if ( n == 0 || n > s.size() )
    return 0.0;

  double sum = 0.0;
  std::vector<std::size_t> idx( n );
  /* depth-first over tuples, matching u left to right */
  std::function<void( std::size_t, std::size_t )> rec = [&]( std::size_t depth, std::size_t from ) {
    if ( depth == n )
    {
      const auto gap = static_cast<double>( idx[n - 1] - idx[0] + 1 - n );
      sum += std::pow( p.theta_g, gap );
      return;
    }
    for ( auto i = from; i + ( n - depth ) <= s.size(); ++i )
    {
      if ( s[i] != u[depth] )
        continue;
      idx[depth] = i;
      rec( depth + 1, i + 1 );
    }
  };
  rec( 0, 0 );
  return std::pow( p.theta_m, static_cast<double>( n ) ) * sum;
}

namespace detail
{

/*! \brief Per-order gap-weighted match sums.

  Returns S[n-1] = sum_{|u| = n} sum_{i, j} theta_g^(gap(i) + gap(j)) over
  index tuples of `a` and `b` matching u, for n = 1..max_order, so that
  k(a, b) = sum_n theta_m^(2n) S[n-1].

  With E_n(p, q) the weight of matched tuple pairs ending exactly at (p, q):

    E_1(p, q)     = [a_p == b_q]
    E_{n+1}(p, q) = [a_p == b_q] * H_n(p - 1, q - 1)
    H_n(p, q)     = sum_{p' <= p, q' <= q} E_n(p', q') theta_g^((p - p') + (q - q'))

  H is accumulated one axis at a time so no subtraction is needed. Total
  cost is O(max_order * |a| * |b|).
*/
inline std::vector<double> ssk_order_sums( std::span<const symbol> a, std::span<const symbol> b, double theta_g,
                                           std::size_t max_order )
{
  std::vector<double> sums( max_order, 0.0 );
  const auto la = a.size();
  const auto lb = b.size();
  if ( la == 0 || lb == 0 )
    return sums;

  thread_local std::vector<double> e, r, h;
  e.assign( la * lb, 0.0 );
  r.assign( la * lb, 0.0 );
  h.assign( la * lb, 0.0 );

  for ( std::size_t p = 0; p < la; ++p )
    for ( std::size_t q = 0; q < lb; ++q )
      e[p * lb + q] = a[p] == b[q] ? 1.0 : 0.0;

  for ( std::size_t n = 0; n < max_order; ++n )
  {
    double total = 0.0;
    for ( auto v : e )
      total += v;
    sums[n] = total;
    if ( n + 1 == max_order || total == 0.0 )
      break;

    for ( std::size_t p = 0; p < la; ++p )
    {
      double run = 0.0;
      for ( std::size_t q = 0; q < lb; ++q )
      {
        run = e[p * lb + q] + theta_g * run;
        r[p * lb + q] = run;
      }
    }
    for ( std::size_t q = 0; q < lb; ++q )
    {
      double run = 0.0;
      for ( std::size_t p = 0; p < la; ++p )
      {
        run = r[p * lb + q] + theta_g * run;
        h[p * lb + q] = run;
      }
    }
    for ( std::size_t p = 0; p < la; ++p )
      for ( std::size_t q = 0; q < lb; ++q )
        e[p * lb + q] = ( p > 0 && q > 0 && a[p] == b[q] ) ? h[( p - 1 ) * lb + ( q - 1 )] : 0.0;
  }
  return sums;
}

/* sum_n w^(n - 1) * sums[n - 1], with w = theta_m^2 */
inline double weighted_order_sum( std::vector<double> const& sums, double theta_m, bool reduced )
{
  const double w = theta_m * theta_m;
  double scale = reduced ? 1.0 : w;
  double value = 0.0;
  for ( auto s : sums )
  {
    value += scale * s;
    scale *= w;
  }
  return value;
}

/* k(a, b) / theta_m^2: equal ratios to the SSK for theta_m > 0 and continuous at theta_m = 0 */
inline double ssk_reduced( std::span<const symbol> a, std::span<const symbol> b, ssk_params const& p )
{
  return weighted_order_sum( ssk_order_sums( a, b, p.theta_g, p.max_order ), p.theta_m, true );
}

} // namespace detail

/*! \brief SSK value by dynamic programming, O(max_order |a| |b|). */
inline double ssk_value( std::span<const symbol> a, std::span<const symbol> b, ssk_params const& p )
{
  p.validate();
  /* fixed argument order keeps the value exactly symmetric under floating point */
  if ( std::lexicographical_compare( b.begin(), b.end(), a.begin(), a.end() ) )
    std::swap( a, b );
  return detail::weighted_order_sum( detail::ssk_order_sums( a, b, p.theta_g, p.max_order ), p.theta_m, false );
}

/*! \brief k(a, b) / sqrt(k(a, a) k(b, b)); throws when a self-similarity is zero. */
inline double ssk_normalized( std::span<const symbol> a, std::span<const symbol> b, ssk_params const& p )
{
  const auto kaa = ssk_value( a, a, p );
  const auto kbb = ssk_value( b, b, p );
  if ( !( kaa > 0.0 ) || !( kbb > 0.0 ) )
    throw std::domain_error( "ssk_normalized: zero self-similarity" );
  return ssk_value( a, b, p ) / std::sqrt( kaa * kbb );
}

/*! \brief Normalised SSK Gram matrix (unit diagonal, exactly symmetric).

  Entries are evaluated in the theta_m-reduced form, so the matrix is the
  continuous limit at theta_m = 0 rather than undefined there.
*/
inline Eigen::MatrixXd gram( std::span<const sequence> seqs, ssk_params const& p )
{
  p.validate();
  const auto n = static_cast<Eigen::Index>( seqs.size() );
  if ( n == 0 )
    throw std::domain_error( "gram: no sequences" );

  Eigen::VectorXd self( n );
  for ( Eigen::Index i = 0; i < n; ++i )
  {
    self( i ) = detail::ssk_reduced( seqs[i], seqs[i], p );
    if ( !( self( i ) > 0.0 ) )
      throw std::domain_error( "gram: zero self-similarity" );
  }

  Eigen::MatrixXd k( n, n );
  for ( Eigen::Index i = 0; i < n; ++i )
  {
    k( i, i ) = 1.0;
    for ( Eigen::Index j = 0; j < i; ++j )
      k( i, j ) = k( j, i ) = detail::ssk_reduced( seqs[i], seqs[j], p ) / std::sqrt( self( i ) * self( j ) );
  }
  return k;
}

/*! \brief Positional overlap kernel exp(-(1/K) sum_i [a_i != b_i] / l_i). */
inline double overlap_value( std::span<const symbol> a, std::span<const symbol> b, overlap_params const& p )
{
  if ( a.size() != b.size() || a.size() != p.lengthscales.size() )
    throw std::domain_error( "overlap_value: length mismatch" );
  if ( a.empty() )
    return 1.0;
  double s = 0.0;
  for ( std::size_t i = 0; i < a.size(); ++i )
    if ( a[i] != b[i] )
      s += 1.0 / p.lengthscales[i];
  return std::exp( -s / static_cast<double>( a.size() ) );
}

/*! \brief Central finite-difference gradient of an objective over (theta_m, theta_g).

  Perturbed points are clamped into [0, 1]; the difference quotient uses
  the actual (possibly one-sided) step.
*/
template<typename Objective>
std::array<double, 2> kernel_param_gradient( ssk_params const& p, Objective&& nll, double h = 1e-5 )
{
  std::array<double, 2> grad{};
  for ( int c = 0; c < 2; ++c )
  {
    ssk_params lo = p, hi = p;
    double& x_lo = c == 0 ? lo.theta_m : lo.theta_g;
    double& x_hi = c == 0 ? hi.theta_m : hi.theta_g;
    x_hi = std::min( x_hi + h, 1.0 );
    x_lo = std::max( x_lo - h, 0.0 );
    const double f_hi = nll( hi );
    const double f_lo = nll( lo );
    if ( !std::isfinite( f_hi ) || !std::isfinite( f_lo ) )
      throw std::runtime_error( "kernel_param_gradient: non-finite objective at perturbed point" );
    grad[c] = ( f_hi - f_lo ) / ( x_hi - x_lo );
  }
  return grad;
}

} // namespace boils
