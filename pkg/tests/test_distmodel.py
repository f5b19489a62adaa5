import math

import pytest

from xpuperf.catalog import LlmModelConfig
from xpuperf.distmodel import (
    ByteWidths,
    CommMode,
    ParallelismPlan,
    comm_time,
    enumerate_plans,
    estimate,
    min_devices,
    scaleout_report,
    scenario_bytes,
)
from xpuperf.errors import EmptyPlanSetError, InfeasibleError, InfeasiblePlanError
from xpuperf.workload import InferencePoint, Phase, kv_cache_bytes, weight_bytes


def point(model, batch=1, prompt_len=128, context_len=None, phase=Phase.DECODE):
    return InferencePoint(
        model=model,
        batch=batch,
        prompt_len=prompt_len,
        context_len=context_len or prompt_len,
        phase=phase,
    )


class TestMinDevices:
    def test_mi300_70b_128k(self, catalog):
        p = catalog.get_platform("MI300")
        m = catalog.get_model("Llama-3.1-70B")
        assert min_devices(p, m, 1, 131072, headroom=0.9) == 2
        # 184.2 GB demand against 172.8 GB usable per device
        total = weight_bytes(m) + kv_cache_bytes(m, 1, 131072)
        assert total > 0.9 * 192e9
        assert total <= 2 * 0.9 * 192e9

    def test_cs3_before_quantum(self, catalog):
        p = catalog.get_platform("CS-3")
        m = catalog.get_model("Llama-3.1-70B")
        assert min_devices(p, m, 1, 131072, headroom=0.9) == 5

    def test_quantum_rounding_groq(self, catalog):
        p = catalog.get_platform("Groq")
        m = catalog.get_model("Llama-3.1-8B")
        n = min_devices(p, m, 1, 2048, headroom=0.9)
        assert n % 72 == 0

    def test_tiny_model_needs_one(self, catalog):
        p = catalog.get_platform("H100")
        m = LlmModelConfig(
            name="tiny", n_layers=1, d_model=2, n_heads=1, n_kv_heads=1, d_head=2,
            d_ff=4, vocab_size=4, n_params=62,
        )
        assert min_devices(p, m, 1, 1) == 1

    def test_infeasible_when_over_max(self, catalog):
        p = catalog.get_platform("Groq")
        m = catalog.get_model("Llama-3.1-405B")
        with pytest.raises(InfeasibleError):
            min_devices(p, m, 64, 131072)


class TestEnumeratePlans:
    def test_pp_only_platform(self, catalog):
        p = catalog.get_platform("CS-3")
        m = catalog.get_model("Llama-3.1-70B")
        assert enumerate_plans(p, m, 4) == [ParallelismPlan(tp=1, pp=4)]

    def test_groq_factorizations(self, catalog):
        p = catalog.get_platform("Groq")
        m = catalog.get_model("Llama-3.1-70B")  # n_kv_heads = 8
        plans = enumerate_plans(p, m, 8)
        assert set((x.tp, x.pp) for x in plans) == {(1, 8), (2, 4), (4, 2), (8, 1)}

    def test_kv_head_divisibility(self, catalog):
        p = catalog.get_platform("H100")
        m = catalog.get_model("Llama-3.1-70B")
        plans = enumerate_plans(p, m, 16)
        assert all(x.tp <= 8 for x in plans)
        assert (16, 1) not in [(x.tp, x.pp) for x in plans]

    def test_pp_capped_by_layers(self, catalog):
        p = catalog.get_platform("CS-3")
        m = catalog.get_model("Llama-3.1-70B")  # 80 layers
        with pytest.raises(EmptyPlanSetError):
            enumerate_plans(p, m, 81)


class TestCommTime:
    def test_no_partition_no_comm(self, catalog):
        p = catalog.get_platform("H100")
        m = catalog.get_model("Llama-3.1-8B")
        bytes_, secs = comm_time(p, m, point(m), ParallelismPlan(1, 1), Phase.DECODE)
        assert bytes_ == 0 and secs == 0.0

    def test_ring_allreduce_hand_formula(self, catalog):
        p = catalog.get_platform("H100")
        m = LlmModelConfig(
            name="one-layer", n_layers=1, d_model=8, n_heads=2, n_kv_heads=2, d_head=4,
            d_ff=16, vocab_size=16, n_params=1000,
        )
        pt = point(m, batch=1, prompt_len=1)
        bytes_, secs = comm_time(p, m, pt, ParallelismPlan(tp=2, pp=1), Phase.DECODE)
        msg = 1 * 1 * 8 * 2  # B * s_tok * d_model * act bytes
        per_allreduce = 2 * (2 - 1) / 2 * msg / p.interconnect_bw_bytes_per_s + 2 * (
            2 - 1
        ) * p.interconnect_latency_s
        assert secs == pytest.approx(2 * per_allreduce)  # 2 all-reduces x 1 layer

    def test_pp_boundary_hand_formula(self, catalog):
        p = catalog.get_platform("CS-3")
        m = catalog.get_model("Llama-3.1-8B")
        pt = point(m, batch=2, prompt_len=64, phase=Phase.PREFILL)
        bytes_, secs = comm_time(p, m, pt, ParallelismPlan(tp=1, pp=4), Phase.PREFILL)
        msg = 2 * 64 * 4096 * 2
        assert bytes_ == 3 * msg
        assert secs == pytest.approx(
            3 * (msg / p.interconnect_bw_bytes_per_s + p.interconnect_latency_s)
        )

    def test_decode_volume_is_prefill_over_prompt(self, catalog):
        p = catalog.get_platform("H100")
        m = catalog.get_model("Llama-3.1-70B")
        pt = point(m, batch=2, prompt_len=512)
        plan = ParallelismPlan(tp=4, pp=2)
        pre_bytes, _ = comm_time(p, m, pt, plan, Phase.PREFILL)
        dec_bytes, _ = comm_time(p, m, pt, plan, Phase.DECODE)
        assert pre_bytes == dec_bytes * 512

    def test_comm_nondecreasing_in_tp_and_pp(self, catalog):
        p = catalog.get_platform("H100")
        m = catalog.get_model("Llama-3.1-70B")
        pt = point(m, batch=1, prompt_len=1024)
        times_tp = [
            comm_time(p, m, pt, ParallelismPlan(tp, 1), Phase.PREFILL)[1] for tp in (1, 2, 4, 8)
        ]
        assert all(b >= a for a, b in zip(times_tp, times_tp[1:]))
        times_pp = [
            comm_time(p, m, pt, ParallelismPlan(1, pp), Phase.PREFILL)[1] for pp in (1, 2, 4, 8)
        ]
        assert all(b >= a for a, b in zip(times_pp, times_pp[1:]))


class TestEstimate:
    def test_h100_8b_memory_bound_tpot(self, catalog):
        p = catalog.get_platform("H100")
        m = catalog.get_model("Llama-3.1-8B")
        e = estimate(p, m, point(m, prompt_len=128), ParallelismPlan(1, 1))
        assert e.tpot_s == pytest.approx(1.606e10 / 3.35e12, rel=0.01)
        assert e.tpot_s == pytest.approx(4.79e-3, abs=2e-5)

    def test_energy_formula(self, catalog):
        p = catalog.get_platform("H100")
        m = catalog.get_model("Llama-3.1-8B")
        e = estimate(p, m, point(m, prompt_len=128), ParallelismPlan(1, 1))
        assert e.energy_per_output_token_j == pytest.approx(
            1 * 700 * p.decode_power_fraction * e.tpot_s
        )
        assert e.energy_per_input_token_j == pytest.approx(
            1 * 700 * p.prefill_power_fraction * e.ttft_s / 128
        )

    def test_modes_identical_without_partitioning(self, catalog):
        p = catalog.get_platform("H100")
        m = catalog.get_model("Llama-3.1-8B")
        opt = estimate(p, m, point(m), ParallelismPlan(1, 1), CommMode.OPTIMISTIC)
        real = estimate(p, m, point(m), ParallelismPlan(1, 1), CommMode.REALISTIC)
        assert opt.ttft_s == real.ttft_s and opt.tpot_s == real.tpot_s

    def test_realistic_slower_when_partitioned(self, catalog):
        p = catalog.get_platform("H100")
        m = catalog.get_model("Llama-3.1-70B")
        pt = point(m, prompt_len=4096)
        for plan in (ParallelismPlan(8, 1), ParallelismPlan(2, 2), ParallelismPlan(1, 4)):
            opt = estimate(p, m, pt, plan, CommMode.OPTIMISTIC)
            real = estimate(p, m, pt, plan, CommMode.REALISTIC)
            assert real.ttft_s > opt.ttft_s
            assert real.tpot_s > opt.tpot_s

    def test_tpot_nonincreasing_in_tp(self, catalog):
        p = catalog.get_platform("H100")
        m = catalog.get_model("Llama-3.1-70B")
        pt = point(m, prompt_len=1024)
        tpots = [
            estimate(p, m, pt, ParallelismPlan(tp, 8 // tp), CommMode.OPTIMISTIC).tpot_s
            for tp in (1, 2, 4, 8)
        ]
        assert all(b <= a for a, b in zip(tpots, tpots[1:]))

    def test_energy_per_token_nonincreasing_in_batch(self, catalog):
        p = catalog.get_platform("MI300")
        m = catalog.get_model("Llama-3.1-8B")
        plan = ParallelismPlan(2, 2)
        energies = [
            estimate(p, m, point(m, batch=b, prompt_len=512), plan).energy_per_output_token_j
            for b in (1, 2, 4, 8, 16)
        ]
        assert all(b <= a for a, b in zip(energies, energies[1:]))

    def test_capacity_infeasible(self, catalog):
        p = catalog.get_platform("Groq")
        m = catalog.get_model("Llama-3.1-70B")
        with pytest.raises(InfeasiblePlanError) as exc:
            estimate(p, m, point(m), ParallelismPlan(1, 1))
        assert exc.value.reason == "capacity"

    def test_divisibility_infeasible(self, catalog):
        p = catalog.get_platform("H100")
        m = catalog.get_model("Llama-3.1-70B")
        with pytest.raises(InfeasiblePlanError) as exc:
            estimate(p, m, point(m), ParallelismPlan(16, 4))
        assert exc.value.reason == "divisibility"

    def test_parallelism_infeasible(self, catalog):
        p = catalog.get_platform("CS-3")
        m = catalog.get_model("Llama-3.1-70B")
        with pytest.raises(InfeasiblePlanError) as exc:
            estimate(p, m, point(m), ParallelismPlan(2, 4))
        assert exc.value.reason == "parallelism"

    def test_allocation_quantum_in_energy(self, catalog):
        p = catalog.get_platform("Groq")
        m = catalog.get_model("Llama-3.1-8B")
        widths = ByteWidths(bytes_per_param=1, bytes_per_kv_elem=1, bytes_per_act=1)
        pt = point(m, prompt_len=128)
        n = min_devices(p, m, 1, 128, widths=widths)
        plans = [x for x in enumerate_plans(p, m, n)]
        e = estimate(p, m, pt, plans[0], widths=widths)
        assert e.n_devices_allocated % 72 == 0
        assert e.n_devices_allocated >= e.plan.n_devices

    def test_memory_vs_compute_crossover(self, catalog):
        # below the ridge point the bandwidth term must win the max()
        p = catalog.get_platform("H100")
        m = catalog.get_model("Llama-3.1-8B")
        e = estimate(p, m, point(m, batch=1, prompt_len=16), ParallelismPlan(1, 1))
        total = scenario_bytes(m, 1, 16)
        ai = (1 * (2 * m.n_params + 4 * m.n_layers * 16 * m.d_model)) / total
        assert ai < p.peak_flops / p.mem_bw_bytes_per_s
        assert e.tpot_s == pytest.approx(total / p.mem_bw_bytes_per_s)

    def test_pipelined_batch_prefill(self, catalog):
        # one prompt cannot use pp for compute; a large batch streams through
        p = catalog.get_platform("H100")
        m = catalog.get_model("Llama-3.1-8B")
        single = estimate(
            p, m, point(m, batch=1, prompt_len=2048, phase=Phase.PREFILL),
            ParallelismPlan(1, 4), CommMode.OPTIMISTIC,
        )
        nones = estimate(
            p, m, point(m, batch=1, prompt_len=2048, phase=Phase.PREFILL),
            ParallelismPlan(1, 1), CommMode.OPTIMISTIC,
        )
        assert single.ttft_s == pytest.approx(nones.ttft_s)  # pp does not help B=1
        batched = estimate(
            p, m, point(m, batch=32, prompt_len=2048, phase=Phase.PREFILL),
            ParallelismPlan(1, 4), CommMode.OPTIMISTIC,
        )
        flat = estimate(
            p, m, point(m, batch=32, prompt_len=2048, phase=Phase.PREFILL),
            ParallelismPlan(1, 1), CommMode.OPTIMISTIC,
        )
        expected_q = (4 + 32 - 1) / (32 * 4)
        assert batched.ttft_s / flat.ttft_s == pytest.approx(expected_q)


class TestScaleoutReport:
    def test_groq_capacity_counts(self, catalog):
        p = catalog.get_platform("Groq")
        m = catalog.get_model("Llama-3.1-70B")
        report = scaleout_report(p, m, 1, 131072)
        by_setting = {r["setting"]: r for r in report.rows}
        assert by_setting["fp16"]["capacity_devices"] == math.ceil(2 * m.n_params / 0.23e9)
        assert by_setting["fp8"]["capacity_devices"] == math.ceil(m.n_params / 0.23e9)
        assert report.reported_deployment_devices == 576
        assert "576" in report.note

    def test_no_flag_for_other_platforms(self, catalog):
        p = catalog.get_platform("H100")
        m = catalog.get_model("Llama-3.1-70B")
        report = scaleout_report(p, m, 1, 131072)
        assert report.reported_deployment_devices is None
