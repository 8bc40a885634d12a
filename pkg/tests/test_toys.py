import numpy as np
import pytest

from cfmvc.data import load_dataset, save_dataset
from cfmvc.exceptions import DomainError
from cfmvc.toys import RING_RADII, blob_sizes, fft_view, gen_blobs, gen_three_ring, gen_two_moon
from oracles import naive_dft3


def test_fft_view():
    out = fft_view([[1.0, 0.0], [1.0, 1.0]])
    np.testing.assert_allclose(out, [[1.0, 1.0, 0.0, 0.0], [2.0, 0.0, 0.0, 0.0]])


class TestTwoMoon:

    def test_shape(self, two_moon):
        assert two_moon.n == 200
        assert two_moon.c == 2
        assert [x.shape for x in two_moon.views] == [(200, 2), (200, 4)]
        assert np.bincount(two_moon.truth).tolist() == [100, 100]

    def test_seeded(self):
        a, b = gen_two_moon(20, 0.1, seed=4), gen_two_moon(20, 0.1, seed=4)
        np.testing.assert_array_equal(a.views[0], b.views[0])
        assert not np.array_equal(a.views[0], gen_two_moon(20, 0.1, seed=5).views[0])

    def test_second_view_is_spectrum(self, two_moon):
        np.testing.assert_allclose(two_moon.views[1], fft_view(two_moon.views[0]))

    def test_second_view_matches_naive_dft(self, two_moon):
        spectrum = naive_dft3(two_moon.views[0][:, None, :])[:, 0, :]
        expected = np.hstack([spectrum.real, spectrum.imag])
        np.testing.assert_allclose(two_moon.views[1], expected, atol=1e-10)

    def test_noise_free_half_circles(self):
        ds = gen_two_moon(40, 0.0, seed=0)
        centres = np.array([[0.0, 0.0], [1.0, 0.5]])[ds.truth]
        np.testing.assert_allclose(np.linalg.norm(ds.views[0] - centres, axis=1), 1.0, atol=1e-12)

    @pytest.mark.parametrize('n,noise', [(7, 0.1), (0, 0.1), (10, -1.0)])
    def test_invalid(self, n, noise):
        with pytest.raises(DomainError):
            gen_two_moon(n, noise)


class TestThreeRing:

    def test_sizes(self):
        ds = gen_three_ring(100, 0.05, seed=0)
        assert sorted(np.bincount(ds.truth).tolist()) == [33, 33, 34]

    def test_default_sizes(self, three_ring):
        assert sorted(np.bincount(three_ring.truth).tolist()) == [66, 67, 67]

    def test_radius_thresholds_recover_rings(self, three_ring):
        radii = np.linalg.norm(three_ring.views[0], axis=1)
        np.testing.assert_array_equal(np.digitize(radii, [1.5, 2.5]), three_ring.truth)

    def test_noise_free_radii(self):
        ds = gen_three_ring(30, 0.0, seed=1)
        radii = np.linalg.norm(ds.views[0], axis=1)
        np.testing.assert_allclose(radii, np.asarray(RING_RADII)[ds.truth])

    def test_invalid(self):
        with pytest.raises(DomainError):
            gen_three_ring(2)


class TestBlobs:

    @pytest.mark.parametrize('n,c,imbalance,expected', [
        (100, 4, 1.0, [25, 25, 25, 25]),
        (10, 3, 1.0, [4, 3, 3]),
        (300, 2, 2.0, [200, 100]),
    ])
    def test_sizes(self, n, c, imbalance, expected):
        assert blob_sizes(n, c, imbalance) == expected

    def test_imbalance_ratio(self):
        sizes = blob_sizes(1000, 4, 8.0)
        assert sum(sizes) == 1000
        assert sizes[0] / sizes[-1] == pytest.approx(8.0, rel=0.02)

    def test_views_and_truth(self):
        ds = gen_blobs(60, 3, dims=4, views=3, seed=2)
        assert len(ds.views) == 3
        assert all(x.shape == (60, 4) for x in ds.views)
        assert np.bincount(ds.truth).tolist() == [20, 20, 20]

    def test_rotated_views_preserve_geometry(self):
        ds = gen_blobs(30, 2, dims=3, views=2, seed=1, view_noise=0.0)
        a, b = ds.views
        gram_a, gram_b = a @ a.T, b @ b.T
        np.testing.assert_allclose(gram_a, gram_b, atol=1e-9)

    def test_one_dimensional(self):
        ds = gen_blobs(20, 2, dims=1, separation=100.0, seed=0)
        x = ds.views[0].ravel()
        assert (x[ds.truth == 0].max() < x[ds.truth == 1].min())

    @pytest.mark.parametrize('kwargs', [dict(n=5, c=1), dict(n=1, c=2), dict(n=10, c=2, dims=0),
                                        dict(n=10, c=2, imbalance=0.5),
                                        dict(n=4, c=2, imbalance=100.0)])
    def test_invalid(self, kwargs):
        with pytest.raises(DomainError):
            gen_blobs(**kwargs)


class TestGeneratorsOnDisk:

    @pytest.mark.parametrize('make', [lambda: gen_two_moon(50, 0.05, seed=1),
                                      lambda: gen_three_ring(50, 0.05, seed=1),
                                      lambda: gen_blobs(50, 3, views=2, seed=1)])
    def test_save_load_identity(self, tmp_path, make):
        ds = make()
        save_dataset(ds, tmp_path)
        back = load_dataset(tmp_path)
        for x, y in zip(ds.views, back.views):
            np.testing.assert_array_equal(x, y)
        np.testing.assert_array_equal(ds.truth, back.truth)

    def test_same_seed_same_files(self, tmp_path):
        save_dataset(gen_three_ring(30, 0.05, seed=9), tmp_path / 'a')
        save_dataset(gen_three_ring(30, 0.05, seed=9), tmp_path / 'b')
        for name in ('manifest.json', 'view_1.csv', 'view_2.csv', 'labels.csv'):
            assert (tmp_path / 'a' / name).read_bytes() == (tmp_path / 'b' / name).read_bytes()
