from __future__ import annotations

from dataclasses import asdict, dataclass

from ..errors import ZeroGroundTruth


@dataclass(frozen=True)
class DetectionMetrics:
    detection_rate: float  # TP / GT
    paper_accuracy: float  # TP / (GT + FP)
    precision: float  # TP / (TP + FP)

    def as_dict(self) -> dict:
        return asdict(self)


def detection_metrics(true_positives: int, ground_truth: int, false_positives: int) -> DetectionMetrics:
    """Detection rate, accuracy-with-false-positives and precision.

    The accuracy denominator is ground truth plus false positives, so
    123 hits of 124 cars with 16 false alarms gives 123/140. Precision is
    0 when nothing was detected.
    """
    if ground_truth == 0:
        raise ZeroGroundTruth("ground truth count is zero")
    if not 0 <= true_positives <= ground_truth or false_positives < 0:
        raise ValueError(
            f"need 0 <= TP <= GT and FP >= 0, got TP={true_positives} GT={ground_truth} "
            f"FP={false_positives}"
        )
    detected = true_positives + false_positives
    return DetectionMetrics(
        detection_rate=true_positives / ground_truth,
        paper_accuracy=true_positives / (ground_truth + false_positives),
        precision=true_positives / detected if detected else 0.0,
    )
