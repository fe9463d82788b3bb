#include "doctest.h"
#include "ivxv/error.hpp"
#include "ivxv/functionalities.hpp"
#include "ivxv/shuffle.hpp"

using namespace ivxv;

namespace {

const SessionId kSid = "sid-1";

std::shared_ptr<const Group> toy(std::uint32_t c = 4) { return std::make_shared<const Group>(setup("toy", c)); }

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::Protocol;
}

}  // namespace

TEST_CASE("bulletin board ordering and access") {
  const auto g = toy();
  BulletinBoard bb(kSid);
  std::vector<std::pair<bool, std::uint64_t>> seen;
  bb.set_observer([&](bool priv, const BoardEntry& e) { seen.emplace_back(priv, e.seq); });

  const auto kp = keypair_from_secret(*g, g->scalar(3));
  CHECK(bb.pub_post(kSid, PublicKeyPost{kp.pk}) == 1);
  const Ballot b{{1, 1}, encrypt(*g, kp.pk, 1, g->scalar(2)), "aa"};
  CHECK(bb.priv_post(kSid, b) == 2);
  CHECK(bb.pub_post(kSid, PlaintextsPost{{1, std::nullopt}}) == 3);
  CHECK(seen == std::vector<std::pair<bool, std::uint64_t>>{{false, 1}, {true, 2}, {false, 3}});

  CHECK(bb.read_public(kSid).size() == 2);
  CHECK(bb.read(kSid, Role::Auditor).priv->size() == 1);
  CHECK(bb.read(kSid, Role::ElectionAuthority).priv.has_value());
  CHECK_FALSE(bb.read(kSid, Role::Voter).priv.has_value());
  CHECK_FALSE(bb.read(kSid, Role::Trustee).priv.has_value());
  CHECK(code_of([&] { bb.read_private(kSid, Role::Voter); }) == ErrorCode::AccessDenied);
  CHECK(code_of([&] { bb.pub_post("other", PublicKeyPost{kp.pk}); }) == ErrorCode::InvalidSession);

  // Appending never changes an existing prefix.
  const auto d1 = bb.prefix_digest(false, 1);
  bb.pub_post(kSid, PlaintextsPost{{0}});
  CHECK(bb.prefix_digest(false, 1) == d1);
  CHECK_FALSE(bb.prefix_digest(false, 2) == d1);
}

TEST_CASE("board entries survive a JSON round trip") {
  const auto g = toy();
  const auto kp = keypair_from_secret(*g, g->scalar(5));
  const Ciphertext c = encrypt(*g, kp.pk, 2, g->scalar(4));
  const std::vector<BoardPayload> payloads{
      PublicKeyPost{kp.pk}, Ballot{{3, 2}, c, "beef"}, ShufflePost{{c}, {c}, {1, 2, 3}},
      PlaintextsPost{{0, std::nullopt, 3}}};
  BulletinBoard original(kSid), restored(kSid);
  for (const auto& p : payloads) original.pub_post(kSid, p);
  for (const auto& e : original.read_public(kSid)) {
    const auto back = board_entry_from_json(to_json(e));
    CHECK(to_json(back) == to_json(e));
    restored.restore(false, back);
  }
  CHECK(restored.prefix_digest(false, 4) == original.prefix_digest(false, 4));
  CHECK(code_of([&] { restored.restore(false, original.read_public(kSid).front()); }) == ErrorCode::Malformed);
  CHECK(code_of([&] { board_entry_from_json(json{{"seq", 1}, {"kind", "nonsense"}}); }) == ErrorCode::Malformed);
}

TEST_CASE("certification registry") {
  CertRegistry certs(kSid);
  Rng rng(1);
  const std::vector<std::uint8_t> m{1, 2, 3}, other{1, 2, 4};
  const auto sigma = certs.sign(kSid, {4, 1}, m, 4, rng);
  CHECK(certs.verify(kSid, {4, 1}, m, sigma));
  CHECK_FALSE(certs.verify(kSid, {4, 1}, other, sigma));
  CHECK_FALSE(certs.verify(kSid, {4, 2}, m, sigma));
  CHECK_FALSE(certs.verify(kSid, {4, 1}, m, sigma + "0"));
  CHECK_FALSE(certs.verify("other", {4, 1}, m, sigma));
  CHECK(code_of([&] { certs.sign(kSid, {4, 2}, m, 5, rng); }) == ErrorCode::Unauthorized);

  CertRegistry copy(kSid);
  for (const auto& i : certs.issued()) copy.restore(i);
  CHECK(copy.verify(kSid, {4, 1}, m, sigma));
}

TEST_CASE("key generation waits for every trustee") {
  const auto g = toy();
  KeyGenFunctionality kg(kSid, g, 2, 3, Rng(5));
  kg.ready(kSid, 1);
  kg.ready(kSid, 2);
  CHECK(code_of([&] { kg.public_key(kSid); }) == ErrorCode::NotReady);
  CHECK_FALSE(kg.complete());
  kg.ready(kSid, 3);
  const auto pk = kg.public_key(kSid);
  CHECK(kg.complete());
  CHECK(kg.public_key(kSid) == pk);
  CHECK(code_of([&] { kg.ready(kSid, 4); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([&] { kg.ready("other", 1); }) == ErrorCode::InvalidSession);

  // Same seed, same key.
  KeyGenFunctionality again(kSid, g, 2, 3, Rng(5));
  for (std::uint32_t j = 1; j <= 3; ++j) again.ready(kSid, j);
  CHECK(again.public_key(kSid) == pk);
  CHECK(code_of([] { KeyGenFunctionality(kSid, toy(), 4, 3, Rng(1)); }) == ErrorCode::ThresholdExceedsShares);
}

TEST_CASE("threshold decryption") {
  const auto g = toy(4);
  KeyGenFunctionality kg(kSid, g, 2, 3, Rng(8));
  for (std::uint32_t j = 1; j <= 3; ++j) kg.ready(kSid, j);
  const auto pk = kg.public_key(kSid);
  BulletinBoard bb(kSid);
  Rng rng(2);

  std::vector<Ciphertext> outputs;
  for (std::uint32_t m : {3u, 0u, 1u}) outputs.push_back(encrypt(*g, pk, m, g->random_scalar(rng)));
  // g^5 is not a candidate for C = 4.
  outputs.push_back(rerandomize(*g, pk, Ciphertext{g->identity(), g->exp(g->scalar(5))}, g->random_scalar(rng)));

  SUBCASE("t submissions suffice by default") {
    DecFunctionality dec(kSid, g, kg, bb);
    dec.submit_key(kSid, 3);
    CHECK(code_of([&] { dec.decrypt_and_post(kSid); }) == ErrorCode::ThresholdNotMet);
    dec.submit_key(kSid, 1);
    CHECK(code_of([&] { dec.decrypt_and_post(kSid); }) == ErrorCode::MissingShuffle);
    bb.priv_post(kSid, ShufflePost{outputs, outputs, {}});
    const auto pts = dec.decrypt_and_post(kSid);
    CHECK(pts == std::vector<std::optional<std::uint32_t>>{3, 0, 1, std::nullopt});
    CHECK(latest<PlaintextsPost>(bb.read_public(kSid))->plaintexts == pts);
    CHECK(dec.audit(kSid));
    bb.pub_post(kSid, PlaintextsPost{{3, 0, 2, std::nullopt}});
    CHECK_FALSE(dec.audit(kSid));
  }
  SUBCASE("strict mode needs more than t") {
    DecFunctionality dec(kSid, g, kg, bb, true);
    bb.priv_post(kSid, ShufflePost{outputs, outputs, {}});
    dec.submit_key(kSid, 1);
    dec.submit_key(kSid, 2);
    CHECK(code_of([&] { dec.decrypt_and_post(kSid); }) == ErrorCode::ThresholdNotMet);
    dec.submit_key(kSid, 3);
    CHECK(dec.decrypt_and_post(kSid).size() == 4);
  }
}

TEST_CASE("voting and audit devices") {
  const auto g = toy(5);
  CertRegistry certs(kSid);
  BulletinBoard bb(kSid);
  const auto kp = keypair_from_secret(*g, g->scalar(6));
  AuditDevice asd(kSid, g, bb);

  SUBCASE("honest device") {
    VoterDevice vsd(kSid, 2, g, certs, Rng(3));
    const auto cast = vsd.cast(kSid, kp.pk, 4, "");
    CHECK_FALSE(cast.manipulated);
    CHECK(cast.ballot.ssid == SubsessionId{2, 1});
    CHECK(decrypt(*g, kp.sk, cast.ballot.c) == 4);
    CHECK(certs.verify(kSid, cast.ballot.ssid, ciphertext_bytes(cast.ballot.c), cast.ballot.sigma));
    CHECK(code_of([&] { asd.check(kSid, kp.pk, cast.token); }) == ErrorCode::UnknownSsid);
    bb.priv_post(kSid, cast.ballot);
    const auto res = asd.check(kSid, kp.pk, cast.token);
    CHECK(res.matches);
    CHECK(res.observed == 4u);
    CHECK(vsd.cast(kSid, kp.pk, 1, "V").ballot.ssid == SubsessionId{2, 2});
  }
  SUBCASE("corrupted device shifts the vote and is caught by a check") {
    VoterDevice vsd(kSid, 1, g, certs, Rng(4));
    vsd.corrupt(ManipulationPolicy::always(), 2);
    const auto cast = vsd.cast(kSid, kp.pk, 4, "");
    CHECK(cast.manipulated);
    CHECK(cast.encrypted == 1);
    CHECK(cast.token.intent == 4);
    CHECK(decrypt(*g, kp.sk, cast.ballot.c) == 1);
    bb.priv_post(kSid, cast.ballot);
    const auto res = asd.check(kSid, kp.pk, cast.token);
    CHECK_FALSE(res.matches);
    CHECK(res.observed == 1u);
  }
  SUBCASE("check opens the recorded ballot, not the device's copy") {
    VoterDevice vsd(kSid, 1, g, certs, Rng(4));
    const auto cast = vsd.cast(kSid, kp.pk, 3, "");
    Ballot swapped = cast.ballot;
    swapped.c = rerandomize(*g, kp.pk, cast.ballot.c, g->scalar(1));
    bb.priv_post(kSid, swapped);
    CHECK_FALSE(asd.check(kSid, kp.pk, cast.token).matches);
  }
  SUBCASE("policy table and corruption bounds") {
    VoterDevice vsd(kSid, 1, g, certs, Rng(4));
    vsd.corrupt(ManipulationPolicy::from_table({{"", Decision::Honest}}, Decision::Manipulate));
    CHECK_FALSE(vsd.cast(kSid, kp.pk, 0, "").manipulated);
    CHECK(vsd.cast(kSid, kp.pk, 0, "V").manipulated);
    CHECK(code_of([&] { vsd.corrupt(ManipulationPolicy::always(), 5); }) == ErrorCode::Config);
    CHECK(code_of([&] { vsd.corrupt(ManipulationPolicy::always(), 0); }) == ErrorCode::Config);
    VoterDevice single(kSid, 1, toy(1), certs, Rng(4));
    CHECK(code_of([&] { single.corrupt(ManipulationPolicy::always()); }) == ErrorCode::Config);
  }
}

TEST_CASE("voter emulator follows the distribution") {
  const auto dist = BehaviorDistribution::estonia_aggregate();
  VoterEmulator emu(kSid, dist);
  Rng rng(10);
  std::map<std::string, int> counts;
  const int n = 20000;
  for (int i = 0; i < n; ++i) ++counts[emu.sample(kSid, rng).pattern()];
  for (const auto& e : dist.entries()) {
    const double p = e.probability;
    const double sd = std::sqrt(p * (1 - p) / n);
    CAPTURE(e.script.pattern());
    CHECK(std::abs(counts[e.script.pattern()] / double(n) - p) < 4 * sd + 1e-12);
  }
  CHECK(code_of([&] { emu.sample("x", rng); }) == ErrorCode::InvalidSession);
}
