import numpy as np

from lwetrainer.cli import main as cli_main


def test_cli_train_then_serve(tmp_path, toy_tokens, capsys):
    ck = tmp_path / "model.pt"
    rc = cli_main(
        [
            "train", "--tokens", str(toy_tokens["path"]), "--arch", "encoder",
            "--epochs", "1", "--batch-size", "512", "--dim", "32",
            "--lr", "2e-3", "--seed", "0", "--out", str(ck),
        ]
    )
    assert rc == 0
    assert ck.exists()
    out = capsys.readouterr().out
    assert "final_loss," in out

    req, rep = tmp_path / "req", tmp_path / "rep"
    req.mkdir()
    rep.mkdir()
    rng = np.random.default_rng(0)
    a = rng.integers(0, 251, size=(4, 16))
    lines = [f"n=16 q=251 sigma_e=0 kind=query seed=0 count=4"]
    lines += [" ".join(str(int(v)) for v in row) for row in a]
    (req / "req-000001.txt").write_text("\n".join(lines) + "\n")
    rc = cli_main(
        [
            "serve", "--checkpoint", str(ck), "--request-dir", str(req),
            "--reply-dir", str(rep), "--max-requests", "1", "--poll", "0.01",
        ]
    )
    assert rc == 0
    reply = (rep / "rep-000001.txt").read_text().splitlines()
    assert len(reply) == 4 and all(line.startswith("D ") for line in reply)
