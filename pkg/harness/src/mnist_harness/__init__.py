"""MNIST compression study: a small autoencoder with dithered quantization
trained against a joint distortion + classification loss, swept over the
loss weight and the number of quantization levels."""

from .data import DatasetUnavailable, dataset_available, load_split
from .models import Compressor, Decoder, DigitClassifier, Encoder, rate_bits
from .quantize import hard_quantize, noise_bound, quant_step, sample_dither, soft_quantize
from .records import ExperimentRecord, append_record, load_records
from .classifier import evaluate_accuracy, pretrain_classifier
from .compress import train_compressor

__version__ = "0.1.0"
