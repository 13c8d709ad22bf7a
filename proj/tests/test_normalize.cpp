#include <doctest.h>

#include <random>
#include <set>

#include "omh/normalize.hpp"
#include "support.hpp"

using namespace omh;

namespace {

// independent oracle for the simple rule: trim, then cut at the first ? or #
std::string scan_oracle(const std::string& raw) {
    std::string s;
    size_t b = raw.find_first_not_of(" \t\r\n");
    size_t e = raw.find_last_not_of(" \t\r\n");
    if (b != std::string::npos) s = raw.substr(b, e - b + 1);
    std::string out;
    for (char c : s) {
        if (c == '?' || c == '#') break;
        out += c;
    }
    while (!out.empty() && (out.back() == ' ' || out.back() == '\t')) out.pop_back();
    return out;
}

// independent oracle for the case rule: lowercase before the first '/' only
std::string case_oracle(const std::string& key) {
    auto slash = key.find('/');
    std::string host = key.substr(0, slash == std::string::npos ? key.size() : slash);
    std::string rest = slash == std::string::npos ? "" : key.substr(slash);
    for (char& c : host) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return host + rest;
}

}  // namespace

TEST_CASE("simple_normalize strips the query and nothing else") {
    CHECK(simple_normalize("http://a.org/oai?verb=Identify&x=1") == "http://a.org/oai");
    CHECK(simple_normalize("https://b.edu/cgi/oai2") == "https://b.edu/cgi/oai2");
    // first-? rule, checked against the character-scan oracle
    std::string tricky = "  http://c.net/oai?a=1?b=2 ";
    CHECK(simple_normalize(tricky) == scan_oracle(tricky));
    CHECK(simple_normalize(tricky) == "http://c.net/oai");
}

TEST_CASE("simple_normalize strips fragments too") {
    CHECK(simple_normalize("http://a.org/oai#sect") == "http://a.org/oai");
    CHECK(simple_normalize("http://a.org/oai#f?x=1") == "http://a.org/oai");
}

TEST_CASE("simple_normalize rejects empty results") {
    CHECK_FALSE(simple_normalize("   ").has_value());
    CHECK_FALSE(simple_normalize("?verb=Identify").has_value());
    CHECK_FALSE(simple_normalize(" ?x ").has_value());
}

TEST_CASE("strong_normalize maps real endpoints to their comparison forms") {
    CHECK(strong_normalize("https://www.epub.wu.ac.at/cgi/oai2/")->key == "epub.wu.ac.at/cgi/oai2");
    CHECK(strong_normalize("http://drops.dagstuhl.de/opus/phpoai/oai2.php")->key ==
          "drops.dagstuhl.de/opus/phpoai/oai2.php");
}

TEST_CASE("strong_normalize lowercases the host and preserves path case") {
    auto key = strong_normalize("HTTP://WWW.X.ORG/OAI/Request")->key;
    CHECK(key == "x.org/OAI/Request");
    CHECK(key == case_oracle("X.ORG/OAI/Request"));
}

TEST_CASE("strong_normalize edge rules") {
    CHECK(strong_normalize("http://a.org/b//")->key == "a.org/b");  // all trailing slashes go
    CHECK(strong_normalize("www.a.org/x")->key == "a.org/x");       // scheme-less entries kept
    CHECK(strong_normalize("http://www2.a.org/x")->key == "www2.a.org/x");  // www2 is a host
    CHECK(strong_normalize("http://a.org/www.b/x")->key == "a.org/www.b/x");  // mid-path www.
    CHECK(strong_normalize("http://a.org:8080/oai")->key == "a.org:8080/oai");  // ports stay
    CHECK(strong_normalize("http://www.www.a.org/x")->key == "a.org/x");  // stacked www.
    CHECK(strong_normalize("http://a.org/oai?verb=Identify")->key == "a.org/oai");
}

TEST_CASE("strong_normalize rejects empty and non-comparable forms") {
    CHECK_FALSE(strong_normalize("http://").has_value());
    CHECK_FALSE(strong_normalize("https://www./").has_value());
    CHECK_FALSE(strong_normalize("ftp://a.org/x").has_value());  // "://" may not survive
    CHECK_FALSE(strong_normalize("http://a.org/redirect/http://b.org").has_value());
}

TEST_CASE("strong_normalize is idempotent over grammar-generated urls") {
    std::mt19937 rng(20170115);
    for (int i = 0; i < 2000; ++i) {
        auto url = testsupport::random_url(rng);
        auto once = strong_normalize(url);
        if (!once) continue;
        auto twice = strong_normalize(once->key);
        REQUIRE(twice.has_value());
        CHECK(twice->key == once->key);
        CHECK(once->key.find("://") == std::string::npos);
        CHECK(once->key.find('?') == std::string::npos);
        CHECK_FALSE(once->key.starts_with("http://"));
        CHECK_FALSE(once->key.starts_with("https://"));
        CHECK_FALSE(once->key.starts_with("www."));
        CHECK_FALSE(once->key.ends_with("/"));
    }
}

TEST_CASE("protocol variants of one base collapse to a single key") {
    std::mt19937 rng(42);
    for (int i = 0; i < 500; ++i) {
        auto base = testsupport::random_url_base(rng);
        auto a = strong_normalize("http://" + base);
        auto b = strong_normalize("https://" + base);
        auto c = strong_normalize("https://www." + base);
        REQUIRE(a.has_value());
        CHECK(a == b);
        CHECK(a == c);
    }
}

TEST_CASE("dedupe keeps first occurrences") {
    auto [unique, removed] = dedupe({"a", "b", "a"});
    CHECK(unique == std::vector<std::string>{"a", "b"});
    CHECK(removed == 1);
}

TEST_CASE("dedupe of nothing") {
    auto [unique, removed] = dedupe({});
    CHECK(unique.empty());
    CHECK(removed == 0);
}

TEST_CASE("dedupe agrees with a set oracle on random input") {
    std::mt19937 rng(7);
    std::uniform_int_distribution<int> pick(0, 99);
    std::vector<std::string> urls;
    for (int i = 0; i < 1000; ++i) urls.push_back("u" + std::to_string(pick(rng)));
    std::set<std::string> distinct(urls.begin(), urls.end());
    auto [unique, removed] = dedupe(urls);
    CHECK(unique.size() == distinct.size());
    CHECK(removed == 1000 - distinct.size());
    // stability under repetition
    auto [again, removed_again] = dedupe(unique);
    CHECK(again == unique);
    CHECK(removed_again == 0);
}
