#include <boils/oracle.hpp>

#include <gtest/gtest.h>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace boils;

namespace
{

oracle_endpoint stub( std::string command, double timeout = 10.0 ) { return { std::move( command ), timeout }; }

std::vector<std::string> const two{ "rewrite", "balance" };

std::string error_of( oracle_endpoint const& ep, std::vector<std::string> const& tokens = two )
{
  try
  {
    oracle_evaluate( ep, "c.aag", tokens );
  }
  catch ( oracle_error const& e )
  {
    return e.what();
  }
  return {};
}

} // namespace

TEST( Oracle, OkReply )
{
  auto r = oracle_evaluate( stub( "read line; echo 'OK 10 4'" ), "c.aag", two );
  EXPECT_EQ( r.area, 10u );
  EXPECT_EQ( r.delay, 4u );
}

TEST( Oracle, ErrReplyCarriesMessage )
{
  auto msg = error_of( stub( "read line; echo 'ERR bad pass'" ) );
  EXPECT_NE( msg.find( "bad pass" ), std::string::npos );
}

TEST( Oracle, TokenCountStub )
{
  const auto ep = stub( "read cmd path seq; echo \"OK $(printf '%s\\n' \"$seq\" | awk -F';' '{print NF}') 3\"" );
  std::vector<std::string> tokens;
  for ( int i = 0; i < 20; ++i )
    tokens.push_back( i % 2 ? "rewrite -z" : "fraig" );
  EXPECT_EQ( oracle_evaluate( ep, "c.aag", tokens ).area, 20u );
}

TEST( Oracle, RequestLineFormat )
{
  const auto dir = std::filesystem::temp_directory_path() / ( "boils_oracle_" + std::to_string( ::getpid() ) );
  std::filesystem::create_directories( dir );
  const auto file = dir / "request.txt";
  oracle_evaluate( stub( "cat > '" + file.string() + "'; echo 'OK 1 1'" ), "some/circuit.aag",
                   std::vector<std::string>{ "rewrite -z", "balance", "fraig" } );
  std::ifstream in( file );
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_EQ( ss.str(), "EVAL some/circuit.aag rewrite -z;balance;fraig\n" );
  std::filesystem::remove_all( dir );
}

TEST( Oracle, Timeout )
{
  const auto t0 = std::chrono::steady_clock::now();
  auto msg = error_of( stub( "sleep 5; echo 'OK 1 1'", 0.3 ) );
  const double took = std::chrono::duration<double>( std::chrono::steady_clock::now() - t0 ).count();
  EXPECT_NE( msg.find( "timed out" ), std::string::npos );
  EXPECT_LT( took, 3.0 );
}

TEST( Oracle, NonzeroExit )
{
  EXPECT_NE( error_of( stub( "read line; exit 4" ) ).find( "abnormally" ), std::string::npos );
  EXPECT_NE( error_of( stub( "read line; echo 'OK 1 1'; exit 2" ) ).find( "nonzero" ), std::string::npos );
}

TEST( Oracle, MalformedReplies )
{
  for ( std::string reply : { "OK ten 4", "OK 1", "OK 1 2 3", "DONE 1 2", "OK -1 2", "" } )
  {
    auto msg = error_of( stub( "read line; echo '" + reply + "'" ) );
    EXPECT_FALSE( msg.empty() ) << reply;
  }
  try
  {
    oracle_evaluate( stub( "read line; echo 'garbage here'" ), "c.aag", two );
    FAIL();
  }
  catch ( oracle_error const& e )
  {
    EXPECT_NE( e.output().find( "garbage here" ), std::string::npos );
  }
}

TEST( Oracle, ChildIgnoringInput )
{
  auto r = oracle_evaluate( stub( "exec 0<&-; echo 'OK 7 2'" ), "c.aag", two );
  EXPECT_EQ( r.area, 7u );
}

TEST( Oracle, InvalidEndpoint )
{
  EXPECT_THROW( oracle_evaluate( stub( "" ), "c.aag", two ), std::invalid_argument );
  EXPECT_THROW( oracle_evaluate( stub( "true", 0.0 ), "c.aag", two ), std::invalid_argument );
}

TEST( Oracle, JoinTokens )
{
  EXPECT_EQ( join_tokens( two ), "rewrite;balance" );
  EXPECT_EQ( join_tokens( std::vector<std::string>{} ), "" );
}
