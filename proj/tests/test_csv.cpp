#include <doctest.h>

#include <cstdint>
#include <string>
#include <vector>

#include "core/csv.hpp"
#include "core/errors.hpp"

using namespace schedlaw;

TEST_CASE("format_double emits the shortest exact decimal") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(2.0) == "2");
  CHECK(format_double(-0.25) == "-0.25");
  // Round trip must be bitwise exact even for values without a short form.
  for (double v : {1.0 / 3.0, 1e300, 6.062e-12, 123456.789, 0.30000000000000004}) {
    CHECK(std::stod(format_double(v)) == v);
  }
}

TEST_CASE("loss trace csv round trips with and without the lr column") {
  LossTrace trace;
  trace.steps = {1, 5, 10};
  trace.losses = {3.5, 1.25, 0.8};

  const std::string bare = trace_to_csv(trace);
  CHECK(bare == "step,loss\n1,3.5\n5,1.25\n10,0.8\n");
  LossTrace back = trace_from_csv(bare);
  CHECK(back.steps == trace.steps);
  CHECK(back.losses == trace.losses);
  CHECK(back.lrs.empty());

  trace.lrs = {0.1, 0.05, 0.025};
  const std::string with_lr = trace_to_csv(trace);
  CHECK(with_lr == "step,loss,lr\n1,3.5,0.1\n5,1.25,0.05\n10,0.8,0.025\n");
  back = trace_from_csv(with_lr);
  CHECK(back.lrs == trace.lrs);
}

TEST_CASE("loss trace parser tolerates blank lines and CRLF endings") {
  const LossTrace trace =
      trace_from_csv("step,loss\r\n\r\n1,2.5\r\n\n2,2.0\r\n");
  CHECK(trace.steps == std::vector<std::int64_t>{1, 2});
  CHECK(trace.losses == std::vector<double>{2.5, 2.0});
}

TEST_CASE("loss trace parser reports the offending line and column") {
  CHECK_THROWS_WITH_AS(trace_from_csv("loss,step\n1,2\n"),
                       doctest::Contains("line 1"), validation_error);
  CHECK_THROWS_WITH_AS(trace_from_csv("step,loss\n1,abc\n"),
                       doctest::Contains("line 2"), validation_error);
  CHECK_THROWS_WITH_AS(trace_from_csv("step,loss\n1,abc\n"),
                       doctest::Contains("column 'loss'"), validation_error);
  CHECK_THROWS_WITH_AS(trace_from_csv("step,loss\n1,2,3\n"),
                       doctest::Contains("expected 2 fields"),
                       validation_error);
  CHECK_THROWS_WITH_AS(trace_from_csv("step,loss\n2,1\n1,2\n"),
                       doctest::Contains("strictly increasing"),
                       validation_error);
  CHECK_THROWS_WITH_AS(trace_from_csv(""), doctest::Contains("empty"),
                       validation_error);
}

TEST_CASE("run records csv round trips with optional columns") {
  std::vector<RunRecord> records(2);
  records[0] = {0.01, 1000.0, HorizonUnit::Steps, 1.5, 32.0, 1e6};
  records[1] = {0.02, 2048000.0, HorizonUnit::Tokens, 1.2, 0.0, 0.0};

  const std::string text = records_to_csv(records);
  CHECK(text ==
        "eta_ref,T_or_tokens,unit,final_loss,batch_size,model_size\n"
        "0.01,1000,steps,1.5,32,1e+06\n"
        "0.02,2048000,tokens,1.2,,\n");

  const std::vector<RunRecord> back = records_from_csv(text);
  REQUIRE(back.size() == 2);
  CHECK(back[0].eta_ref == 0.01);
  CHECK(back[0].horizon == 1000.0);
  CHECK(back[0].unit == HorizonUnit::Steps);
  CHECK(back[0].final_loss == 1.5);
  CHECK(back[0].batch_size == 32.0);
  CHECK(back[0].model_size == 1e6);
  CHECK(back[1].unit == HorizonUnit::Tokens);
  CHECK(back[1].batch_size == 0.0);
  CHECK(back[1].model_size == 0.0);
}

TEST_CASE("run records csv omits optional columns when all values are unset") {
  std::vector<RunRecord> records(1);
  records[0] = {0.1, 500.0, HorizonUnit::Steps, 2.0, 0.0, 0.0};
  CHECK(records_to_csv(records) ==
        "eta_ref,T_or_tokens,unit,final_loss\n0.1,500,steps,2\n");
}

TEST_CASE("run records parser accepts model_size without batch_size") {
  const std::vector<RunRecord> records = records_from_csv(
      "eta_ref,T_or_tokens,unit,final_loss,model_size\n"
      "0.01,1000,steps,1.5,124000000\n");
  REQUIRE(records.size() == 1);
  CHECK(records[0].batch_size == 0.0);
  CHECK(records[0].model_size == 124000000.0);
}

TEST_CASE("run records parser rejects malformed headers and cells") {
  CHECK_THROWS_WITH_AS(
      records_from_csv("eta_ref,T_or_tokens,unit\n"),
      doctest::Contains("missing columns"), validation_error);
  CHECK_THROWS_WITH_AS(
      records_from_csv("T_or_tokens,eta_ref,unit,final_loss\n"),
      doctest::Contains("expected column 'eta_ref'"), validation_error);
  // Optional columns are positional: model_size may not precede batch_size.
  CHECK_THROWS_WITH_AS(
      records_from_csv(
          "eta_ref,T_or_tokens,unit,final_loss,model_size,batch_size\n"),
      doctest::Contains("unknown column 'batch_size'"), validation_error);
  CHECK_THROWS_WITH_AS(
      records_from_csv(
          "eta_ref,T_or_tokens,unit,final_loss,runtime\n"),
      doctest::Contains("unknown column 'runtime'"), validation_error);
  CHECK_THROWS_WITH_AS(
      records_from_csv(
          "eta_ref,T_or_tokens,unit,final_loss\n0.01,1000,epochs,1.5\n"),
      doctest::Contains("line 2"), validation_error);
  CHECK_THROWS_WITH_AS(
      records_from_csv(
          "eta_ref,T_or_tokens,unit,final_loss\n-0.01,1000,steps,1.5\n"),
      doctest::Contains("line 2"), validation_error);
  CHECK_THROWS_WITH_AS(
      records_from_csv("eta_ref,T_or_tokens,unit,final_loss\n\n"),
      doctest::Contains("no data rows"), validation_error);
}

TEST_CASE("bound trace and prediction table serializers") {
  BoundTrace trace;
  trace.tau_grid = {1, 10, 100};
  trace.values = {5.0, 0.5, 0.075};
  CHECK(bound_trace_to_csv(trace) == "tau,bound\n1,5\n10,0.5\n100,0.075\n");

  CHECK(prediction_table_to_csv({{1000.0, 2.5}, {1e6, 1.25}}) ==
        "T,predicted_loss\n1000,2.5\n1e+06,1.25\n");
}

TEST_CASE("learning rate sequence serializer numbers steps from 1") {
  CHECK(sequence_to_csv({0.5, 0.25, 0.0}) ==
        "step,lr\n1,0.5\n2,0.25\n3,0\n");
}
