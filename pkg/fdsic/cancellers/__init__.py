from .build import build_canceller, build_cancellers, Canceller
