/*!
  \file acquisition.hpp
  \brief Expected improvement, its trust-region local-search maximiser and
         the adaptive radius schedule.
*/

#pragma once

#include "gp.hpp"
#include "sequence.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <unordered_set>

namespace boils
{

inline double normal_pdf( double z ) { return std::exp( -0.5 * z * z ) / std::sqrt( 2.0 * std::numbers::pi ); }
inline double normal_cdf( double z ) { return 0.5 * std::erfc( -z / std::numbers::sqrt2 ); }

/*! \brief E[max(g - incumbent, 0)] for g ~ N(mean, sigma^2); zero for sigma <= 1e-12. */
inline double expected_improvement( double mean, double sigma, double incumbent )
{
  if ( !( sigma > 1e-12 ) )
    return 0.0;
  const double z = ( mean - incumbent ) / sigma;
  return std::max( 0.0, sigma * ( z * normal_cdf( z ) + normal_pdf( z ) ) );
}

/*! \brief EI of the model posterior at `seq` against the best observed objective. */
template<typename Covariance>
double expected_improvement( gp_model<Covariance> const& model, sequence const& seq, double incumbent )
{
  auto [mu, var] = posterior_point( model, seq );
  return expected_improvement( mu, std::sqrt( std::max( var, 0.0 ) ), incumbent );
}

struct acq_config
{
  std::size_t ls_budget = 100;
  std::size_t succ_threshold = 3;
  std::size_t fail_threshold = 20;

  void validate() const
  {
    if ( ls_budget < 1 )
      throw std::invalid_argument( "acq_config: ls_budget must be >= 1" );
    if ( succ_threshold < 1 || fail_threshold < 1 )
      throw std::invalid_argument( "acq_config: streak thresholds must be >= 1" );
  }
};

struct trust_region_state
{
  sequence center;
  std::size_t radius = 0;
  std::size_t success_streak = 0;
  std::size_t fail_streak = 0;
  std::size_t restarts = 0;

  bool operator==( trust_region_state const& ) const = default;
};

/*! \brief Streak bookkeeping: +1 radius after `succ_threshold` consecutive
    improvements, -1 after `fail_threshold` consecutive failures, capped to
    [0, K]. A radius of 0 signals that a restart is due. */
inline trust_region_state update_trust_region( trust_region_state tr, bool improved, acq_config const& cfg )
{
  const auto k = tr.center.size();
  if ( improved )
  {
    tr.fail_streak = 0;
    if ( ++tr.success_streak >= cfg.succ_threshold )
    {
      tr.radius = std::min( tr.radius + 1, k );
      tr.success_streak = 0;
    }
  }
  else
  {
    tr.success_streak = 0;
    if ( ++tr.fail_streak >= cfg.fail_threshold )
    {
      tr.radius = tr.radius > 0 ? tr.radius - 1 : 0;
      tr.fail_streak = 0;
    }
  }
  return tr;
}

inline trust_region_state restart_trust_region( trust_region_state tr, rng& gen, alphabet const& alpha, std::size_t k )
{
  if ( tr.radius != 0 )
    throw std::logic_error( "restart_trust_region: radius must be 0" );
  tr.center = random_sequence( gen, alpha, k );
  tr.radius = k;
  tr.success_streak = 0;
  tr.fail_streak = 0;
  ++tr.restarts;
  return tr;
}

struct local_search_result
{
  sequence best;
  double best_value = -std::numeric_limits<double>::infinity();
  std::size_t evaluations = 0;
  std::vector<double> accepted_values; /* acquisition value of each state the walker occupied */
};

/*! \brief Hill-climbing maximiser of an acquisition inside TR(center, radius).

  Starts at a random point of the ball, proposes uniform feasible
  Hamming-1 moves and accepts strict improvements until `ls_budget`
  acquisition evaluations are spent. Returns the best visited sequence,
  preferring sequences outside `evaluated` when any was visited.
*/
template<typename Acquisition>
local_search_result local_search( Acquisition&& acquisition, trust_region_state const& tr, alphabet const& alpha,
                                  acq_config const& cfg, rng& gen,
                                  std::unordered_set<sequence, sequence_hash> const* evaluated = nullptr )
{
  cfg.validate();
  if ( tr.radius < 1 )
    throw std::logic_error( "local_search: radius must be >= 1" );

  local_search_result res;
  auto is_novel = [&]( sequence const& s ) { return !evaluated || evaluated->count( s ) == 0; };

  sequence best_novel, best_any;
  double v_novel = -std::numeric_limits<double>::infinity();
  double v_any = -std::numeric_limits<double>::infinity();
  bool have_novel = false;
  auto consider = [&]( sequence const& s, double v ) {
    if ( res.evaluations == 1 || v > v_any )
    {
      v_any = v;
      best_any = s;
    }
    if ( is_novel( s ) && ( !have_novel || v > v_novel ) )
    {
      have_novel = true;
      v_novel = v;
      best_novel = s;
    }
  };

  sequence current = random_point_in_ball( gen, tr.center, tr.radius, alpha );
  double current_value = acquisition( current );
  res.evaluations = 1;
  consider( current, current_value );
  res.accepted_values.push_back( current_value );

  while ( res.evaluations < cfg.ls_budget )
  {
    auto next = random_neighbor_in_ball( gen, current, tr.center, tr.radius, alpha );
    if ( next == current )
      break;
    const double v = acquisition( next );
    ++res.evaluations;
    consider( next, v );
    if ( v > current_value )
    {
      current = std::move( next );
      current_value = v;
      res.accepted_values.push_back( v );
    }
  }

  res.best = have_novel ? best_novel : best_any;
  res.best_value = have_novel ? v_novel : v_any;
  return res;
}

/*! \brief EI maximisation within the trust region for a fitted model. */
template<typename Covariance>
sequence local_search_maximize( gp_model<Covariance> const& model, trust_region_state const& tr, alphabet const& alpha,
                                acq_config const& cfg, rng& gen, double incumbent,
                                std::unordered_set<sequence, sequence_hash> const* evaluated = nullptr )
{
  auto ei = [&]( sequence const& s ) { return expected_improvement( model, s, incumbent ); };
  return local_search( ei, tr, alpha, cfg, gen, evaluated ).best;
}

} // namespace boils
