/*!
  \file optimizer.hpp
  \brief Sequence optimisers against a budgeted black box: trust-region BO
         with the SSK kernel, standard BO with a positional kernel, a
         genetic algorithm, stratified random search and greedy construction.
*/

#pragma once

#include "acquisition.hpp"
#include "covariance.hpp"
#include "gp.hpp"
#include "kernel.hpp"
#include "sequence.hpp"
#include "synthenv.hpp"

#include <chrono>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace boils
{

struct eval_record
{
  sequence seq;
  std::size_t area = 0;
  std::size_t delay = 0;
  double qor = 0.0;
  std::size_t iteration = 0;
  double wall_time = 0.0; /* seconds since the black box was created */
};

struct run_history
{
  std::vector<eval_record> records;
  std::vector<double> best_so_far;
  std::size_t model_failures = 0; /* BO rounds that fell back to a random proposal */

  std::size_t best_index() const
  {
    if ( records.empty() )
      throw std::logic_error( "run_history: no records" );
    std::size_t best = 0;
    for ( std::size_t i = 1; i < records.size(); ++i )
      if ( records[i].qor < records[best].qor )
        best = i;
    return best;
  }
  eval_record const& best() const { return records[best_index()]; }
};

class budget_exhausted : public std::logic_error
{
public:
  budget_exhausted() : std::logic_error( "black box: evaluation budget exhausted" ) {}
};

/*! \brief Counts every evaluation against a fixed budget and records it. */
class black_box
{
public:
  using evaluator = std::function<qor_result( sequence const& )>;

  black_box( evaluator eval, std::size_t budget, std::optional<double> stop_at_qor = std::nullopt )
      : eval_( std::move( eval ) ), budget_( budget ), stop_at_( stop_at_qor ), start_( std::chrono::steady_clock::now() )
  {
  }

  qor_result evaluate( sequence const& seq, std::size_t iteration )
  {
    if ( calls_used_ >= budget_ )
      throw budget_exhausted();
    ++calls_used_;
    auto r = eval_( seq );
    const double t = std::chrono::duration<double>( std::chrono::steady_clock::now() - start_ ).count();
    hist_.records.push_back( { seq, r.area, r.delay, r.qor, iteration, t } );
    const double prev = hist_.best_so_far.empty() ? std::numeric_limits<double>::infinity() : hist_.best_so_far.back();
    hist_.best_so_far.push_back( std::min( prev, r.qor ) );
    return r;
  }

  std::size_t calls_used() const noexcept { return calls_used_; }
  std::size_t budget() const noexcept { return budget_; }
  std::size_t remaining() const noexcept { return budget_ - calls_used_; }

  bool target_reached() const noexcept
  {
    return stop_at_ && !hist_.best_so_far.empty() && hist_.best_so_far.back() <= *stop_at_;
  }
  bool exhausted() const noexcept { return calls_used_ >= budget_ || target_reached(); }

  double best_qor() const noexcept
  {
    return hist_.best_so_far.empty() ? std::numeric_limits<double>::infinity() : hist_.best_so_far.back();
  }

  run_history& history() noexcept { return hist_; }
  run_history const& history() const noexcept { return hist_; }

private:
  evaluator eval_;
  std::size_t budget_;
  std::size_t calls_used_ = 0;
  std::optional<double> stop_at_;
  std::chrono::steady_clock::time_point start_;
  run_history hist_;
};

struct optimizer_config
{
  std::size_t k = 20;
  std::size_t n_init = 20;

  ssk_params ssk{ 0.5, 0.5, 3 };
  acq_config acq;
  fit_config fit;                /* first model fit of a run */
  bool warm_start = true;        /* later fits start from the previous hyperparameters */
  std::size_t warm_fit_steps = 15;

  std::size_t population = 20;
  std::size_t tournament = 3;
  double crossover_swap = 0.5;
  double mutation_rate = -1.0; /* negative selects 1/k */

  void validate() const
  {
    if ( k < 1 )
      throw std::invalid_argument( "optimizer_config: k must be >= 1" );
    if ( n_init < 1 )
      throw std::invalid_argument( "optimizer_config: n_init must be >= 1" );
    if ( population < 2 )
      throw std::invalid_argument( "optimizer_config: population must be >= 2" );
    if ( tournament < 1 )
      throw std::invalid_argument( "optimizer_config: tournament size must be >= 1" );
    if ( mutation_rate > 1.0 || !( crossover_swap >= 0.0 && crossover_swap <= 1.0 ) )
      throw std::invalid_argument( "optimizer_config: rates must lie in [0, 1]" );
    ssk.validate();
    acq.validate();
    fit.validate();
  }
};

inline double qor_improvement( double best_qor, double ref_qor )
{
  if ( !( ref_qor > 0.0 ) )
    throw std::domain_error( "qor_improvement: reference QoR must be positive" );
  return 100.0 * ( ref_qor - best_qor ) / ref_qor;
}

namespace detail
{

enum class region_policy
{
  adaptive, /* 3/20 schedule with restarts */
  full      /* radius pinned at k */
};

template<typename Covariance>
run_history bo_loop( black_box& bb, alphabet const& alpha, optimizer_config const& cfg, rng& gen, Covariance cov,
                     typename Covariance::params_type init, region_policy policy )
{
  cfg.validate();
  const auto k = cfg.k;

  for ( auto const& s : stratified_sample( gen, std::min( cfg.n_init, bb.remaining() ), alpha, k ) )
  {
    if ( bb.exhausted() )
      break;
    bb.evaluate( s, 0 );
  }
  auto& hist = bb.history();
  if ( hist.records.empty() )
    return hist;

  std::unordered_set<sequence, sequence_hash> evaluated;
  std::vector<sequence> xs;
  std::vector<double> ys; /* the model maximises -QoR */
  for ( auto const& r : hist.records )
  {
    evaluated.insert( r.seq );
    xs.push_back( r.seq );
    ys.push_back( -r.qor );
  }

  trust_region_state tr;
  tr.center = hist.best().seq;
  tr.radius = k;

  auto params = init;
  bool fitted_once = false;
  for ( std::size_t it = 1; !bb.exhausted(); ++it )
  {
    sequence proposal;
    try
    {
      auto fc = cfg.fit;
      fc.seed = gen.next();
      if ( fitted_once && cfg.warm_start )
        fc.steps = cfg.warm_fit_steps;
      auto model = fit( cov, xs, ys, cfg.warm_start ? params : init, fc );
      params = model.params;
      fitted_once = true;
      proposal = local_search_maximize( model, tr, alpha, cfg.acq, gen, -bb.best_qor(), &evaluated );
    }
    catch ( std::exception const& )
    {
      ++hist.model_failures;
      proposal = random_point_in_ball( gen, tr.center, tr.radius, alpha );
    }

    const double previous_best = bb.best_qor();
    const auto r = bb.evaluate( proposal, it );
    evaluated.insert( proposal );
    xs.push_back( proposal );
    ys.push_back( -r.qor );

    const bool improved = r.qor < previous_best;
    if ( improved )
      tr.center = proposal;
    if ( policy == region_policy::full )
      continue;
    tr = update_trust_region( tr, improved, cfg.acq );
    if ( tr.radius == 0 )
      tr = restart_trust_region( tr, gen, alpha, k );
  }
  return hist;
}

} // namespace detail

/*! \brief Trust-region BO with the SSK kernel. */
inline run_history boils_run( black_box& bb, alphabet const& alpha, optimizer_config const& cfg, rng& gen )
{
  ssk_covariance cov( alpha.size(), cfg.ssk.max_order );
  return detail::bo_loop( bb, alpha, cfg, gen, std::move( cov ), cfg.ssk, detail::region_policy::adaptive );
}

/*! \brief Standard BO: positional overlap kernel, acquisition searched over the whole space. */
inline run_history sbo_run( black_box& bb, alphabet const& alpha, optimizer_config const& cfg, rng& gen )
{
  overlap_params init{ std::vector<double>( cfg.k, 1.0 ) };
  return detail::bo_loop( bb, alpha, cfg, gen, overlap_covariance{}, init, detail::region_policy::full );
}

inline run_history ga_run( black_box& bb, alphabet const& alpha, optimizer_config const& cfg, rng& gen )
{
  cfg.validate();
  const auto k = cfg.k;
  const double mutation = cfg.mutation_rate < 0.0 ? 1.0 / static_cast<double>( k ) : cfg.mutation_rate;

  struct member
  {
    sequence seq;
    double qor;
  };
  std::vector<member> pop;
  while ( pop.size() < cfg.population && !bb.exhausted() )
  {
    auto s = random_sequence( gen, alpha, k );
    const auto r = bb.evaluate( s, 0 );
    pop.push_back( { std::move( s ), r.qor } );
  }

  auto tournament = [&]() -> member const& {
    std::size_t best = gen.uniform_index( pop.size() );
    for ( std::size_t t = 1; t < cfg.tournament; ++t )
    {
      const auto c = gen.uniform_index( pop.size() );
      if ( pop[c].qor < pop[best].qor || ( pop[c].qor == pop[best].qor && c < best ) )
        best = c;
    }
    return pop[best];
  };

  for ( std::size_t generation = 1; !bb.exhausted(); ++generation )
  {
    std::vector<member> offspring;
    while ( offspring.size() < cfg.population && !bb.exhausted() )
    {
      auto const& a = tournament();
      auto const& b = tournament();
      sequence child = a.seq;
      for ( std::size_t i = 0; i < k; ++i )
      {
        if ( gen.bernoulli( cfg.crossover_swap ) )
          child.ops[i] = b.seq.ops[i];
        if ( alpha.size() > 1 && gen.bernoulli( mutation ) )
          child.ops[i] = detail::resample_other( gen, child.ops[i], alpha.size() );
      }
      const auto r = bb.evaluate( child, generation );
      offspring.push_back( { std::move( child ), r.qor } );
    }

    /* elitism: the best parent survives, the best offspring fill the rest */
    auto by_qor = []( member const& x, member const& y ) { return x.qor < y.qor; };
    std::stable_sort( pop.begin(), pop.end(), by_qor );
    std::stable_sort( offspring.begin(), offspring.end(), by_qor );
    std::vector<member> next{ pop.front() };
    for ( std::size_t i = 0; i < offspring.size() && next.size() < cfg.population; ++i )
      next.push_back( offspring[i] );
    pop = std::move( next );
  }
  return bb.history();
}

inline run_history random_search_run( black_box& bb, alphabet const& alpha, optimizer_config const& cfg, rng& gen )
{
  cfg.validate();
  for ( std::size_t batch = 0; !bb.exhausted(); ++batch )
    for ( auto const& s : stratified_sample( gen, std::min( alpha.size(), bb.remaining() ), alpha, cfg.k ) )
    {
      if ( bb.exhausted() )
        break;
      bb.evaluate( s, batch );
    }
  return bb.history();
}

/*! \brief Left-to-right construction; every one-token extension probe costs one evaluation. */
inline run_history greedy_run( black_box& bb, alphabet const& alpha, optimizer_config const& cfg, rng& )
{
  cfg.validate();
  sequence prefix;
  for ( std::size_t step = 0; step < cfg.k && !bb.exhausted(); ++step )
  {
    std::optional<symbol> best;
    double best_qor = std::numeric_limits<double>::infinity();
    std::size_t probes = 0;
    for ( symbol t = 0; t < alpha.size(); ++t )
    {
      if ( bb.exhausted() )
        break;
      ++probes;
      auto probe = prefix;
      probe.ops.push_back( t );
      const auto r = bb.evaluate( probe, step );
      if ( r.qor < best_qor )
      {
        best_qor = r.qor;
        best = t;
      }
    }
    if ( probes < alpha.size() )
      break;
    prefix.ops.push_back( *best );
  }
  return bb.history();
}

enum class optimizer_kind
{
  boils,
  sbo,
  ga,
  rs,
  greedy
};

inline optimizer_kind parse_optimizer( std::string_view name )
{
  if ( name == "boils" )
    return optimizer_kind::boils;
  if ( name == "sbo" )
    return optimizer_kind::sbo;
  if ( name == "ga" )
    return optimizer_kind::ga;
  if ( name == "rs" )
    return optimizer_kind::rs;
  if ( name == "greedy" )
    return optimizer_kind::greedy;
  throw std::invalid_argument( "unknown optimizer '" + std::string( name ) + "'" );
}

inline std::string to_string( optimizer_kind k )
{
  switch ( k )
  {
  case optimizer_kind::boils:
    return "boils";
  case optimizer_kind::sbo:
    return "sbo";
  case optimizer_kind::ga:
    return "ga";
  case optimizer_kind::rs:
    return "rs";
  case optimizer_kind::greedy:
    return "greedy";
  }
  return "?";
}

inline run_history run_optimizer( optimizer_kind kind, black_box& bb, alphabet const& alpha,
                                  optimizer_config const& cfg, std::uint64_t seed )
{
  rng gen( seed );
  switch ( kind )
  {
  case optimizer_kind::boils:
    return boils_run( bb, alpha, cfg, gen );
  case optimizer_kind::sbo:
    return sbo_run( bb, alpha, cfg, gen );
  case optimizer_kind::ga:
    return ga_run( bb, alpha, cfg, gen );
  case optimizer_kind::rs:
    return random_search_run( bb, alpha, cfg, gen );
  case optimizer_kind::greedy:
    return greedy_run( bb, alpha, cfg, gen );
  }
  throw std::logic_error( "run_optimizer: unreachable" );
}

} // namespace boils
