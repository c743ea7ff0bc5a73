import pytest
import torch

from mnist_harness.quantize import (
    hard_quantize,
    level_centers,
    noise_bound,
    quant_step,
    sample_dither,
    soft_quantize,
)


class TestLevels:
    def test_three_levels(self):
        assert quant_step(3) == pytest.approx(1.0)
        assert noise_bound(3) == pytest.approx(0.5)
        torch.testing.assert_close(level_centers(3), torch.tensor([-1.0, 0.0, 1.0]))

    def test_two_levels_sign_quantizer(self):
        assert quant_step(2) == pytest.approx(2.0)
        torch.testing.assert_close(level_centers(2), torch.tensor([-1.0, 1.0]))
        values = torch.tensor([-0.9, -0.1, 0.1, 0.9])
        torch.testing.assert_close(hard_quantize(values, 2),
                                   torch.tensor([-1.0, -1.0, 1.0, 1.0]))

    def test_five_levels_span(self):
        torch.testing.assert_close(level_centers(5),
                                   torch.tensor([-1.0, -0.5, 0.0, 0.5, 1.0]))

    def test_single_level_rejected(self):
        with pytest.raises(ValueError):
            quant_step(1)


class TestHardQuantize:
    def test_zero_is_fixed_point(self):
        for levels in (3, 5, 9):
            assert float(hard_quantize(torch.tensor([0.0]), levels)) == 0.0

    @pytest.mark.parametrize("levels", [2, 3, 4, 5])
    def test_idempotent(self, levels):
        values = torch.linspace(-1.3, 1.3, 257)  # dithered inputs can leave [-1, 1]
        once = hard_quantize(values, levels)
        torch.testing.assert_close(hard_quantize(once, levels), once)

    @pytest.mark.parametrize("levels", [2, 3, 4, 5])
    def test_output_is_a_level(self, levels):
        centers = level_centers(levels)
        values = torch.rand(1000) * 2.4 - 1.2
        out = hard_quantize(values, levels)
        dists = (out.unsqueeze(-1) - centers).abs().min(dim=-1).values
        assert float(dists.max()) < 1e-6

    @pytest.mark.parametrize("levels", [2, 3, 4, 5])
    def test_nearest_level_inside_range(self, levels):
        centers = level_centers(levels)
        values = torch.rand(1000) * 2 - 1
        out = hard_quantize(values, levels)
        best = centers[(values.unsqueeze(-1) - centers).abs().argmin(dim=-1)]
        torch.testing.assert_close(out, best)


class TestDither:
    @pytest.mark.parametrize("levels", [2, 3, 5])
    def test_noise_bounds(self, levels):
        gen = torch.Generator().manual_seed(0)
        u = sample_dither((5000,), levels, gen)
        bound = noise_bound(levels)
        assert float(u.min()) >= -bound and float(u.max()) <= bound
        assert abs(float(u.mean())) < 0.02 * bound + 0.01

    def test_seeded_reproducible(self):
        a = sample_dither((64, 3), 3, torch.Generator().manual_seed(7))
        b = sample_dither((64, 3), 3, torch.Generator().manual_seed(7))
        torch.testing.assert_close(a, b)


class TestSoftQuantize:
    def test_rejects_bad_temperature(self):
        with pytest.raises(ValueError):
            soft_quantize(torch.zeros(3), 3, 0.0)

    def test_differentiable(self):
        values = torch.linspace(-0.9, 0.9, 7, requires_grad=True)
        out = soft_quantize(values, 3, 5.0)
        out.sum().backward()
        assert values.grad is not None and torch.isfinite(values.grad).all()

    @pytest.mark.parametrize("levels", [2, 3, 4, 5])
    def test_converges_to_hard(self, levels):
        # sample away from decision boundaries, where pointwise convergence holds
        step = quant_step(levels)
        gen = torch.Generator().manual_seed(3)
        values = hard_quantize(torch.rand(500, generator=gen) * 2 - 1, levels)
        values = values + (torch.rand(500, generator=gen) - 0.5) * 0.8 * step
        values = values.clamp(-1, 1)
        hard = hard_quantize(values, levels)
        deviations = []
        for temperature in (10.0, 100.0, 1000.0):
            soft = soft_quantize(values, levels, temperature)
            deviations.append(float((soft - hard).abs().max()))
        assert deviations[-1] < 1e-3
        assert deviations[0] >= deviations[-1]
