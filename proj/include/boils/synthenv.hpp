/*!
  \file synthenv.hpp
  \brief The native synthesis black box: sequences of passes applied to a
         fresh circuit, scored by area and delay ratios against a reference
         flow.
*/

#pragma once

#include "aig.hpp"
#include "passes.hpp"
#include "sequence.hpp"

#include <fstream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace boils
{

struct qor_spec
{
  std::size_t ref_area = 0;
  std::size_t ref_delay = 0;

  void validate() const
  {
    if ( ref_area == 0 || ref_delay == 0 )
      throw std::domain_error( "qor_spec: reference area and delay must be positive" );
  }
};

struct qor_result
{
  std::size_t area = 0;
  std::size_t delay = 0;
  double qor = 0.0;
};

inline double qor_value( std::size_t area, std::size_t delay, qor_spec const& spec )
{
  spec.validate();
  return static_cast<double>( area ) / static_cast<double>( spec.ref_area ) +
         static_cast<double>( delay ) / static_cast<double>( spec.ref_delay );
}

inline alphabet native_alphabet() { return alphabet( native_pass_tokens() ); }

/* native alphabet plus the oracle-only passes */
inline alphabet oracle_alphabet()
{
  auto tokens = native_pass_tokens();
  tokens.insert( tokens.end(), oracle_pass_tokens().begin(), oracle_pass_tokens().end() );
  return alphabet( std::move( tokens ) );
}

inline std::vector<std::string> const& reference_tokens()
{
  static const std::vector<std::string> tokens{ "balance", "rewrite",    "refactor", "balance",    "rewrite",
                                                "rewrite -z", "balance", "refactor -z", "rewrite -z", "balance" };
  return tokens;
}

/* the reference flow expressed over `alpha`, which must contain its tokens */
inline sequence reference_sequence( alphabet const& alpha )
{
  sequence s;
  for ( auto const& t : reference_tokens() )
    s.ops.push_back( alpha.index_of( t ) );
  return s;
}

inline aig_network apply_tokens( aig_network ntk, std::span<const std::string> tokens )
{
  for ( auto const& t : tokens )
    ntk = apply_pass( ntk, t );
  return ntk;
}

inline aig_network apply_sequence( aig_network ntk, sequence const& seq, alphabet const& alpha )
{
  for ( auto op : seq )
    ntk = apply_pass( ntk, alpha.token( op ) );
  return ntk;
}

/* reference statistics of a fresh circuit */
inline qor_spec make_qor_spec( aig_network const& fresh )
{
  const auto s = stats( apply_tokens( fresh, reference_tokens() ) );
  qor_spec spec{ s.area, s.delay };
  spec.validate();
  return spec;
}

inline qor_result evaluate_qor( aig_network const& fresh, sequence const& seq, alphabet const& alpha,
                                qor_spec const& spec )
{
  const auto s = stats( apply_sequence( fresh, seq, alpha ) );
  return { s.area, s.delay, qor_value( s.area, s.delay, spec ) };
}

inline aig_network read_aiger_file( std::string const& path )
{
  std::ifstream in( path, std::ios::binary );
  if ( !in )
    throw std::runtime_error( "cannot open circuit file '" + path + "'" );
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_aiger_ascii( ss.str() );
}

/*! \brief Native evaluator bound to one circuit. */
class native_environment
{
public:
  explicit native_environment( aig_network fresh, alphabet alpha = native_alphabet() )
      : fresh_( std::move( fresh ) ), alpha_( std::move( alpha ) ), spec_( make_qor_spec( fresh_ ) )
  {
  }

  qor_result operator()( sequence const& seq ) const { return evaluate_qor( fresh_, seq, alpha_, spec_ ); }

  aig_network const& fresh() const noexcept { return fresh_; }
  alphabet const& tokens() const noexcept { return alpha_; }
  qor_spec const& spec() const noexcept { return spec_; }

private:
  aig_network fresh_;
  alphabet alpha_;
  qor_spec spec_;
};

} // namespace boils
