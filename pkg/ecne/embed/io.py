import numpy as np

from .skipgram import EmbeddingMatrix
from ..exceptions import InputError


def write_embeddings(E, names, path):
    """
    Text format: "count dim" on the first line, then one row per item, its name followed by the vector.
    """
    if len(names) != len(E):
        raise ValueError("Got {} names for {} embedding rows".format(len(names), len(E)))
    with open(path, 'w', encoding='utf-8') as f:
        f.write("{} {}\n".format(len(E), E.dim))
        for name, row in zip(names, E.vectors.tolist()):
            f.write(name + ' ' + ' '.join('{:.9g}'.format(x) for x in row) + '\n')


def read_embeddings(path, kind='edge'):
    """
    :raises InputError: malformed header or row

    :return: Row names and the embeddings, in file order
    :rtype: `tuple` of (`list` of `str`, :class:`~ecne.embed.skipgram.EmbeddingMatrix`)
    """
    with open(path, encoding='utf-8') as f:
        header = f.readline().split()
        try:
            count, dim = int(header[0]), int(header[1])
        except (IndexError, ValueError):
            raise InputError("{}: expected a 'count dim' header".format(path))
        names = []
        vectors = np.empty((count, dim), dtype=np.float32)
        for i, line in enumerate(f):
            tokens = line.split()
            if i >= count or len(tokens) != dim + 1:
                raise InputError("{}:{}: expected a name and {} values".format(path, i + 2, dim))
            names.append(tokens[0])
            vectors[i] = [float(x) for x in tokens[1:]]
    if len(names) != count:
        raise InputError("{}: header announces {} rows, found {}".format(path, count, len(names)))
    return names, EmbeddingMatrix(vectors=vectors, kind=kind)
