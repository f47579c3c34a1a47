import io
import os
import struct
import tempfile
from pathlib import Path

import numpy as np
from django.test import SimpleTestCase

from .exceptions import (
    BatchingError, CountMismatchError, IdxFormatError, IdxTruncatedError, LabelRangeError,
    MissingDataFileError, MnistDataError,
)
from .services.batching import make_batch_plan, make_batches
from .services.idx_reader import (
    Dataset, ImageSet, LabelSet, load_idx_images, load_idx_labels, one_hot,
    write_idx_images, write_idx_labels,
)
from .services.loader import STANDARD_FILES, MnistPaths, load_mnist
from .testing import make_synthetic_dataset


def image_bytes(count, rows, cols, payload):
    return struct.pack('>4I', 0x00000803, count, rows, cols) + bytes(payload)


def label_bytes(payload, count=None):
    count = len(payload) if count is None else count
    return struct.pack('>2I', 0x00000801, count) + bytes(payload)


class IdxImageTestCase(SimpleTestCase):
    def test_pixel_scaling_endpoints(self):
        images = load_idx_images(io.BytesIO(image_bytes(1, 1, 2, [0, 255])))
        self.assertEqual(images.pixels[0, 0], 0.0)
        self.assertEqual(images.pixels[0, 1], 1.0)

    def test_header_dimensions(self):
        payload = np.arange(7840) % 256
        images = load_idx_images(io.BytesIO(image_bytes(10, 28, 28, payload.tolist())))
        self.assertEqual((images.count, images.rows, images.cols), (10, 28, 28))
        self.assertEqual(images.pixels.shape, (10, 784))
        self.assertTrue(np.all((images.pixels >= 0) & (images.pixels <= 1)))

    def test_wrong_magic(self):
        data = struct.pack('>4I', 0x00000801, 1, 1, 1) + b'\x00'
        with self.assertRaises(IdxFormatError):
            load_idx_images(io.BytesIO(data))

    def test_truncated_payload(self):
        with self.assertRaises(IdxTruncatedError):
            load_idx_images(io.BytesIO(image_bytes(2, 2, 2, [1, 2, 3])))

    def test_round_trip(self):
        rng = np.random.default_rng(3)
        raw = rng.integers(0, 256, size=(5, 12))
        original = load_idx_images(io.BytesIO(image_bytes(5, 3, 4, raw.ravel().tolist())))
        sink = io.BytesIO()
        write_idx_images(original, sink)
        reloaded = load_idx_images(io.BytesIO(sink.getvalue()))
        self.assertEqual((reloaded.rows, reloaded.cols), (3, 4))
        np.testing.assert_array_equal(reloaded.pixels, original.pixels)


class IdxLabelTestCase(SimpleTestCase):
    def test_labels(self):
        labels = load_idx_labels(io.BytesIO(label_bytes([5, 0, 4])))
        self.assertEqual(labels.labels.tolist(), [5, 0, 4])

    def test_out_of_range_label(self):
        with self.assertRaises(LabelRangeError):
            load_idx_labels(io.BytesIO(label_bytes([1, 10])))

    def test_empty(self):
        labels = load_idx_labels(io.BytesIO(label_bytes([])))
        self.assertEqual(labels.count, 0)

    def test_wrong_magic(self):
        with self.assertRaises(IdxFormatError):
            load_idx_labels(io.BytesIO(struct.pack('>2I', 0x00000803, 0)))

    def test_truncated(self):
        with self.assertRaises(IdxTruncatedError):
            load_idx_labels(io.BytesIO(label_bytes([1, 2], count=3)))

    def test_round_trip(self):
        original = LabelSet(labels=np.array([9, 0, 3, 3]))
        sink = io.BytesIO()
        write_idx_labels(original, sink)
        np.testing.assert_array_equal(load_idx_labels(io.BytesIO(sink.getvalue())).labels, original.labels)


class OneHotTestCase(SimpleTestCase):
    def test_encodings(self):
        self.assertEqual(one_hot(3).tolist(), [0, 0, 0, 1, 0, 0, 0, 0, 0, 0])
        self.assertEqual(one_hot(0).tolist(), [1, 0, 0, 0, 0, 0, 0, 0, 0, 0])

    def test_out_of_range(self):
        with self.assertRaises(LabelRangeError):
            one_hot(10)

    def test_dataset_targets(self):
        dataset = make_synthetic_dataset(50, seed=1)
        np.testing.assert_array_equal(dataset.targets.sum(axis=1), np.ones(50))
        np.testing.assert_array_equal(dataset.targets.argmax(axis=1), dataset.labels.labels)

    def test_mismatched_counts(self):
        images = ImageSet(rows=1, cols=1, pixels=np.zeros((2, 1), dtype=np.float32))
        with self.assertRaises(CountMismatchError):
            Dataset.from_sets(images, LabelSet(labels=np.array([1])))


class BatchingTestCase(SimpleTestCase):
    def setUp(self):
        self.six = make_synthetic_dataset(6)

    def test_exact_partition(self):
        batches = make_batches(self.six, 2, seed=7, epoch_index=0)
        self.assertEqual([len(b) for b in batches], [2, 2, 2])
        self.assertEqual(sorted(np.concatenate(batches).tolist()), list(range(6)))

    def test_partial_final_batch(self):
        batches = make_batches(make_synthetic_dataset(5), 2, seed=7, epoch_index=0)
        self.assertEqual([len(b) for b in batches], [2, 2, 1])

    def test_determinism(self):
        first = make_batches(self.six, 4, seed=11, epoch_index=3)
        second = make_batches(self.six, 4, seed=11, epoch_index=3)
        for a, b in zip(first, second):
            np.testing.assert_array_equal(a, b)

    def test_epochs_reshuffle(self):
        orders = {tuple(make_batch_plan(100, 10, 11, epoch).order) for epoch in range(3)}
        self.assertEqual(len(orders), 3)

    def test_permutation_for_many_sizes(self):
        for count in (1, 7, 33):
            for batch_size in (1, 3, 50):
                plan = make_batch_plan(count, batch_size, seed=count, epoch_index=batch_size)
                joined = np.concatenate(plan.batches())
                self.assertEqual(sorted(joined.tolist()), list(range(count)))

    def test_zero_batch_size(self):
        with self.assertRaises(BatchingError):
            make_batches(self.six, 0, seed=1, epoch_index=0)


class LoaderTestCase(SimpleTestCase):
    def write_files(self, directory):
        dataset = make_synthetic_dataset(8, seed=2)
        for prefix in ('train', 'test'):
            images_name = STANDARD_FILES[f'{prefix}_images']
            labels_name = STANDARD_FILES[f'{prefix}_labels']
            with open(Path(directory) / images_name, 'wb') as sink:
                write_idx_images(dataset.images, sink)
            with open(Path(directory) / labels_name, 'wb') as sink:
                write_idx_labels(dataset.labels, sink)
        return dataset

    def test_load_from_directory(self):
        with tempfile.TemporaryDirectory() as directory:
            dataset = self.write_files(directory)
            train, test = load_mnist(MnistPaths.resolve(directory))
            self.assertEqual(len(train), 8)
            np.testing.assert_array_equal(test.labels.labels, dataset.labels.labels)

    def test_missing_file_names_path(self):
        with tempfile.TemporaryDirectory() as directory:
            self.write_files(directory)
            os.remove(Path(directory) / STANDARD_FILES['test_labels'])
            with self.assertRaises(MissingDataFileError) as ctx:
                MnistPaths.resolve(directory)
            self.assertIn(STANDARD_FILES['test_labels'], str(ctx.exception))

    def test_label_file_shorter_than_images(self):
        with tempfile.TemporaryDirectory() as directory:
            dataset = self.write_files(directory)
            short = LabelSet(labels=dataset.labels.labels[:-1])
            with open(Path(directory) / STANDARD_FILES['train_labels'], 'wb') as sink:
                write_idx_labels(short, sink)
            with self.assertRaises(MnistDataError) as ctx:
                load_mnist(MnistPaths.resolve(directory))
            self.assertIsInstance(ctx.exception, CountMismatchError)
            self.assertIn('8', str(ctx.exception))
