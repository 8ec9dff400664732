#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>
#include <string>
#include <vector>

#include "spantd/balanced_parens.hpp"
#include "spantd/bitvec.hpp"
#include "spantd/budget.hpp"
#include "spantd/choice_dict.hpp"

using namespace spantd;

namespace {

BitVec from_string(const std::string& s) {
    BitVec v(s.size());
    for (size_t i = 0; i < s.size(); ++i)
        if (s[i] == '1') v.set(i + 1);
    return v;
}

BalParen parens_from_string(const std::string& s) {
    BalParen p(s.size());
    for (size_t i = 0; i < s.size(); ++i) p.set(i + 1, s[i] == '(');
    return p;
}

}  // namespace

TEST_CASE("bit vector rank/select on the worked example 101101") {
    BitVec v = from_string("101101");
    CHECK(v.rank(4) == 3);
    CHECK(v.select(3) == 4);
    CHECK(v.rank(0) == 0);
    CHECK(v.rank(6) == 4);
    CHECK(v.select(1) == 1);
    CHECK(v.select(4) == 6);
    CHECK(v.count() == 4);
    CHECK_THROWS(v.select(5));
    CHECK_THROWS(v.rank(7));
}

TEST_CASE("bit vector rank/select agree with a linear scan at scale") {
    const u64 n = 100000;
    std::mt19937_64 rng(20260816);
    BitVec v(n);
    std::vector<char> ref(n + 1, 0);
    for (u64 i = 1; i <= n; ++i) {
        bool b = rng() % 3 == 0;
        if (b) {
            v.set(i);
            ref[i] = 1;
        }
    }
    std::vector<u64> pre(n + 1, 0);
    for (u64 i = 1; i <= n; ++i) pre[i] = pre[i - 1] + ref[i];

    std::uniform_int_distribution<u64> pos(1, n);
    for (int q = 0; q < 1000; ++q) {
        u64 i = pos(rng);
        CHECK(v.rank(i) == pre[i]);
    }
    std::uniform_int_distribution<u64> ord(1, pre[n]);
    for (int q = 0; q < 1000; ++q) {
        u64 j = ord(rng);
        u64 got = v.select(j);
        CHECK(ref[got] == 1);
        CHECK(pre[got] == j);
    }
    CHECK(v.count() == pre[n]);

    // Mutate and re-query: the directory must refresh.
    u64 flip = v.select(pre[n] / 2);
    v.set(flip, false);
    CHECK(v.count() == pre[n] - 1);
    CHECK(v.rank(n) == pre[n] - 1);
}

TEST_CASE("bit vector next_set walks exactly the set positions") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        u64 n = 1 + rng() % 2000;
        BitVec v(n);
        std::set<u64> ref;
        for (u64 i = 1; i <= n; ++i)
            if (rng() % 7 == 0) {
                v.set(i);
                ref.insert(i);
            }
        std::vector<u64> walked;
        for (u64 i = v.next_set(1); i != 0; i = v.next_set(i + 1)) walked.push_back(i);
        CHECK(walked == std::vector<u64>(ref.begin(), ref.end()));
        u64 probe = 1 + rng() % n;
        auto it = ref.lower_bound(probe);
        CHECK(v.next_set(probe) == (it == ref.end() ? 0 : *it));
    }
}

TEST_CASE("choice dictionary behaves like a set under random churn") {
    const u32 n = 5000;
    std::mt19937_64 rng(123);
    ChoiceDict d(n);
    std::set<u32> ref;
    for (int op = 0; op < 10000; ++op) {
        u32 v = 1 + static_cast<u32>(rng() % n);
        switch (rng() % 3) {
            case 0:
                d.add(v);
                ref.insert(v);
                break;
            case 1:
                d.remove(v);
                ref.erase(v);
                break;
            default:
                CHECK(d.contains(v) == (ref.count(v) > 0));
        }
        if (op % 500 == 0) {
            CHECK(d.size() == ref.size());
            std::set<u32> got(d.members().begin(), d.members().end());
            CHECK(got == ref);
        }
    }
    d.clear();
    CHECK(d.empty());
    for (u32 v : ref) CHECK(!d.contains(v));
}

TEST_CASE("static allocation stores packed payloads only for its keys") {
    BitVec keys(300);
    for (u32 v = 3; v <= 300; v += 3) keys.set(v);
    StaticAlloc sa(keys, 11);
    for (u32 v = 3; v <= 300; v += 3) sa.write(v, (v * 17) % 2048);
    for (u32 v = 3; v <= 300; v += 3) CHECK(sa.read(v) == (v * 17) % 2048);
    CHECK(!sa.has(4));
    CHECK_THROWS(sa.read(4));
    CHECK_THROWS(sa.write(3, 2048));

    // Field widths that straddle word boundaries.
    StaticAlloc wide(keys, 61);
    u64 big = (u64(1) << 60) + 12345;
    for (u32 v = 3; v <= 300; v += 3) wide.write(v, big + v);
    for (u32 v = 3; v <= 300; v += 3) CHECK(wide.read(v) == big + v);
}

TEST_CASE("matching parentheses on the worked example (()())") {
    BalParen p = parens_from_string("(()())");
    CHECK(p.findclose(1) == 6);
    // Positions are 1-indexed throughout, so the second inner pair is
    // the open at 4 matching the close at 5.
    CHECK(p.findopen(5) == 4);
    CHECK(p.findclose(4) == 5);
    CHECK(p.findclose(2) == 3);
    CHECK(p.findopen(3) == 2);
    CHECK(p.findopen(6) == 1);
    CHECK_THROWS(p.findclose(3));
    CHECK_THROWS(p.findopen(1));
}

TEST_CASE("matching parentheses agree with a stack oracle on random trees") {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 12; ++trial) {
        // Random balanced sequence via a biased walk, up to ~10^4 nodes.
        u64 nodes = 100 + rng() % 10000;
        std::string s;
        u64 open = 0, closed = 0;
        while (closed < nodes) {
            bool can_open = open < nodes - (open - closed) - closed + open;
            (void)can_open;
            if (open < nodes && (open == closed || rng() % 2)) {
                s.push_back('(');
                ++open;
            } else {
                s.push_back(')');
                ++closed;
            }
        }
        REQUIRE(open == closed);
        BalParen p = parens_from_string(s);
        std::vector<u64> match(s.size() + 1, 0);
        std::vector<u64> stk;
        for (u64 i = 1; i <= s.size(); ++i) {
            if (s[i - 1] == '(')
                stk.push_back(i);
            else {
                match[i] = stk.back();
                match[stk.back()] = i;
                stk.pop_back();
            }
        }
        REQUIRE(stk.empty());
        std::uniform_int_distribution<u64> pos(1, s.size());
        for (int q = 0; q < 2000; ++q) {
            u64 i = pos(rng);
            if (s[i - 1] == '(')
                CHECK(p.findclose(i) == match[i]);
            else
                CHECK(p.findopen(i) == match[i]);
        }
    }
}

TEST_CASE("bit budget tracks a peak and attributes it by tag") {
    BitBudget b;
    {
        BudgetLease a(&b, "alpha", 1000);
        CHECK(b.current() == 1000);
        {
            BudgetLease c(&b, "beta", 500);
            CHECK(b.current() == 1500);
            CHECK(b.peak() == 1500);
        }
        CHECK(b.current() == 1000);
    }
    CHECK(b.current() == 0);
    CHECK(b.peak() == 1500);

    BudgetLease grow(&b, "gamma", 100);
    grow.resize(2000);
    CHECK(b.current() == 2000);
    CHECK(b.peak() == 2000);
}

TEST_CASE("bit vectors report their allocation to the budget") {
    BitBudget b;
    {
        BitVec v(10000, &b, "bits");
        CHECK(b.current() >= 10000);
        CHECK(b.current() <= 10000 + 10000 / 2 + 512);
    }
    CHECK(b.current() == 0);
}
