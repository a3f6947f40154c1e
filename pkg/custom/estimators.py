from clbench.clbench_estimators import LooseFusionEstimator, blend_states


class BlendedFusionEstimator(LooseFusionEstimator):
    """Moves only part of the way to each visual fix instead of resetting to it."""

    BLEND_WEIGHT: float = 0.5

    def correct(self, fix, now):
        weight = float(self.cfg.options.get("blend_weight", self.BLEND_WEIGHT))
        corrected = super().correct(fix, now)
        return blend_states(self.state, corrected, weight)
