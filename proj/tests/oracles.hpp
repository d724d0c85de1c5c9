/* Independent reference implementations used by the unit tests and the
   acceptance binary. Nothing here calls into the code it checks. */

#pragma once

#include <boils/boils.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <vector>

namespace oracle
{

using boils::symbol;

/* c_u(s) by enumerating index subsets as bitmasks */
inline double contribution( std::vector<symbol> const& u, std::vector<symbol> const& s, double tm, double tg )
{
  const std::size_t n = s.size();
  double total = 0.0;
  for ( std::uint32_t mask = 1; mask < ( 1u << n ); ++mask )
  {
    if ( static_cast<std::size_t>( __builtin_popcount( mask ) ) != u.size() )
      continue;
    std::size_t j = 0, first = n, last = 0;
    bool match = true;
    for ( std::size_t i = 0; i < n && match; ++i )
    {
      if ( !( mask >> i & 1u ) )
        continue;
      match = s[i] == u[j++];
      first = std::min( first, i );
      last = i;
    }
    if ( match )
      total += std::pow( tg, static_cast<double>( last - first + 1 - u.size() ) );
  }
  return std::pow( tm, static_cast<double>( u.size() ) ) * total;
}

/* sum over every u in Sigma^1..Sigma^order of c_u(a) c_u(b) */
inline double ssk( std::vector<symbol> const& a, std::vector<symbol> const& b, std::size_t alphabet_size,
                   std::size_t order, double tm, double tg )
{
  double k = 0.0;
  for ( std::size_t len = 1; len <= order; ++len )
  {
    std::vector<symbol> u( len, 0 );
    while ( true )
    {
      k += contribution( u, a, tm, tg ) * contribution( u, b, tm, tg );
      std::size_t p = 0;
      while ( p < len && ++u[p] == alphabet_size )
        u[p++] = 0;
      if ( p == len )
        break;
    }
  }
  return k;
}

struct dense_posterior
{
  Eigen::VectorXd mean;
  Eigen::VectorXd var;
};

/* textbook GP posterior with an explicit inverse; targets already standardised */
inline dense_posterior gp_posterior( Eigen::MatrixXd const& k, Eigen::MatrixXd const& k_cross, Eigen::VectorXd const& k_test,
                                     Eigen::VectorXd const& y, double jitter )
{
  const Eigen::MatrixXd kj = k + jitter * Eigen::MatrixXd::Identity( k.rows(), k.cols() );
  const Eigen::MatrixXd inv = kj.fullPivLu().inverse();
  dense_posterior r;
  r.mean = k_cross.transpose() * inv * y;
  r.var = k_test - ( k_cross.transpose() * inv * k_cross ).diagonal();
  return r;
}

inline double gp_nll( Eigen::MatrixXd const& k, Eigen::VectorXd const& y, double jitter )
{
  const Eigen::MatrixXd kj = k + jitter * Eigen::MatrixXd::Identity( k.rows(), k.cols() );
  const Eigen::MatrixXd inv = kj.fullPivLu().inverse();
  return 0.5 * std::log( kj.determinant() ) + 0.5 * y.dot( inv * y );
}

struct point
{
  double area;
  double delay;
};

/* O(n^2) non-dominated filter; returns a membership flag per input point */
inline std::vector<bool> non_dominated( std::vector<point> const& pts )
{
  std::vector<bool> keep( pts.size(), true );
  for ( std::size_t i = 0; i < pts.size(); ++i )
    for ( std::size_t j = 0; j < pts.size(); ++j )
      if ( pts[j].area <= pts[i].area && pts[j].delay <= pts[i].delay &&
           ( pts[j].area < pts[i].area || pts[j].delay < pts[i].delay ) )
        keep[i] = false;
  return keep;
}

/* truth tables of every output by direct recursive evaluation, one pattern at a time */
inline std::vector<std::vector<bool>> truth_tables( boils::aig_network const& ntk )
{
  const std::size_t patterns = std::size_t{ 1 } << ntk.num_inputs();
  std::vector<std::vector<bool>> out( ntk.num_outputs(), std::vector<bool>( patterns ) );
  std::vector<bool> value( ntk.num_nodes() );
  for ( std::size_t p = 0; p < patterns; ++p )
  {
    value[0] = false;
    for ( std::uint32_t i = 0; i < ntk.num_inputs(); ++i )
      value[1 + i] = ( p >> i ) & 1u;
    for ( auto n = ntk.first_gate(); n < ntk.num_nodes(); ++n )
    {
      auto const& g = ntk.gate( n );
      const bool a = value[g.fanin0 >> 1] != static_cast<bool>( g.fanin0 & 1u );
      const bool b = value[g.fanin1 >> 1] != static_cast<bool>( g.fanin1 & 1u );
      value[n] = a && b;
    }
    for ( std::size_t o = 0; o < ntk.num_outputs(); ++o )
    {
      const auto l = ntk.outputs()[o];
      out[o][p] = value[l >> 1] != static_cast<bool>( l & 1u );
    }
  }
  return out;
}

} // namespace oracle
